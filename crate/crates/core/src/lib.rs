//! Numerical checks for when the Möbius function `(I + lambda*T)(I + mu*T)^-1`
//! of an operator is a contraction.
//!
//! The finite-dimensional criterion is tested three ways (direct spectral
//! norm, sign of a Hermitian quadratic-form gap, and a support-function
//! inequality on the numerical range of `T^-1`). The Volterra integration
//! operator is discretized by midpoint collocation so that its contraction
//! region, the never-contraction of its higher powers, the witness functions
//! for the numerical ranges of its inverse powers and the boundary of its
//! numerical range can all be reproduced on a desk.
//!
//! All inner products on matrices are plain Euclidean. A uniform quadrature
//! weight `h` would cancel from every Rayleigh quotient and norm ratio used
//! here, so it is left out.

pub mod contraction;
pub mod curves;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod operators;
pub mod quadrature;
pub mod spectral;
pub mod tolerances;
pub mod witnesses;

pub use num_complex::Complex64;

pub use contraction::{Classification, ContractionReport, RegionScan, Window};
pub use error::{Error, Result};
pub use geometry::{NumericalRangeBoundary, Support};
pub use linalg::ComplexMatrix;
pub use operators::{DiscretizedOperator, GridFunction, MoebiusParams, OperatorKind};
pub use spectral::SpectralConfig;
