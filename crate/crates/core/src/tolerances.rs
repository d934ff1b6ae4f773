//! Pinned numerical thresholds shared by the library, its tests and the CLI.
//!
//! Values fall in three groups: rounding-level bands for identities that are
//! exact in real arithmetic, tie bands for sign decisions that are
//! numerically undecidable, and discretization bands measured by convergence
//! studies on the Volterra grid.

/// Hermitian check on `max |H - H*|`.
pub const HERMITIAN_DEFECT: f64 = 1e-12;

/// Reciprocal condition estimate below which `I + mu*T` counts as singular.
pub const SINGULAR_RCOND: f64 = 1e-12;

/// Default condition cap for generated test matrices.
pub const DEFAULT_CONDITION_CAP: f64 = 1e6;

/// Slack in the support inequality `2h(lambda - mu) <= |mu|^2 - |lambda|^2`.
pub const SUPPORT_SLACK: f64 = 1e-9;

/// Trials with `|lhs - rhs|` at or below this are ties and are not judged.
pub const SUPPORT_TIE: f64 = 1e-6;

/// Trials with `|direct_norm - 1|` at or below this are ties.
pub const NORM_TIE: f64 = 1e-8;

/// Slack for "norm <= 1" in the semigroup test.
pub const SEMIGROUP_SLACK: f64 = 1e-9;

/// Boundary band for region classification on the discretized Volterra
/// operator at N = 400.
pub const DEFAULT_BAND: f64 = 1e-2;

/// Relative angle tolerance for "z lies on the negative real axis".
pub const RAY_ANGLE_TOL: f64 = 1e-12;

/// Largest `||tA||_1` accepted by the matrix exponential.
pub const EXPM_MAX_NORM: f64 = 50.0;

/// Agreement between closed-form and quadrature witness quotients.
pub const WITNESS_QUADRATURE_TOL: f64 = 1e-6;
