//! When is `(I + lambda T)(I + mu T)^-1` a contraction?
//!
//! Three tests that coincide for invertible `T` on a finite-dimensional
//! space:
//!
//! * the spectral norm of the transform against 1;
//! * the top eigenvalue of `(I + lambda T)^*(I + lambda T) - (I + mu T)^*(I + mu T)`
//!   against 0;
//! * `2 h_{W(T^-1)}(lambda - mu) <= |mu|^2 - |lambda|^2`.
//!
//! For the Volterra operator `W(V^-1)` is the closed right half-plane, so
//! only `lambda` on the segment `[-conj(mu), mu)` with `Re mu > 0` gives
//! norm 1; for `V^n`, `n >= 2`, the norm always exceeds 1.

use std::ops::RangeInclusive;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{support_function, Support};
use crate::linalg::{ComplexMatrix, Factorization};
use crate::operators::{build_volterra, moebius_with_floor, random_invertible_matrix, MoebiusParams};
use crate::spectral::{hermitian_max_eig, matrix_exponential, spectral_norm, SpectralConfig};
use crate::tolerances::{NORM_TIE, SEMIGROUP_SLACK, SINGULAR_RCOND, SUPPORT_SLACK, SUPPORT_TIE};

/// Relative tolerance for "`lambda - mu` is real" in the Volterra oracle.
const RAY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Classification {
    Contraction,
    Boundary,
    NonContraction,
}

impl Classification {
    /// `NonContraction` above `1 + band`, `Boundary` within `band` of 1.
    pub fn from_norm(norm: f64, band: f64) -> Self {
        if norm > 1.0 + band {
            Classification::NonContraction
        } else if (norm - 1.0).abs() <= band {
            Classification::Boundary
        } else {
            Classification::Contraction
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::Contraction => "contraction",
            Classification::Boundary => "boundary",
            Classification::NonContraction => "noncontraction",
        }
    }
}

/// Whether two of the tests reach the same verdict. `None` when either
/// side sits inside its tie band.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Agreement {
    pub norm_gap: Option<bool>,
    pub norm_support: Option<bool>,
    pub gap_support: Option<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContractionReport {
    pub params: MoebiusParams,
    pub direct_norm: f64,
    pub quad_gap: f64,
    /// `2 h_{W(T^-1)}(lambda - mu)`
    pub support_lhs: Support,
    /// `|mu|^2 - |lambda|^2`
    pub support_rhs: f64,
    pub classification: Classification,
    pub tolerance_band: f64,
    pub agreement: Agreement,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupportTest {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `||(I + lambda T)(I + mu T)^-1||`.
///
/// `lambda == mu` gives exactly 1. When `Re mu > 0` and `W(T)` lies in the
/// closed right half-plane, `I + mu T` is invertible and the conditioning
/// guard is skipped; otherwise a reciprocal condition estimate below
/// `1e-12` is a [`Error::SingularPencil`].
pub fn direct_norm_test(t: &ComplexMatrix, p: MoebiusParams, cfg: &SpectralConfig) -> Result<f64> {
    if p.is_degenerate() {
        return Ok(1.0);
    }
    let m = moebius_with_floor(t, p, guard_for(t, p.mu(), cfg)?)?;
    spectral_norm(&m, cfg)
}

fn guard_for(t: &ComplexMatrix, mu: Complex64, cfg: &SpectralConfig) -> Result<Option<f64>> {
    if mu.re > 0.0 && support_function(t, Complex64::new(-1.0, 0.0), cfg)? <= 1e-12 {
        Ok(None)
    } else {
        Ok(Some(SINGULAR_RCOND))
    }
}

/// Top eigenvalue of `(I + lambda T)^*(I + lambda T) - (I + mu T)^*(I + mu T)`,
/// formed as `X + X^* + (|lambda|^2 - |mu|^2) T^* T` with `X = (lambda - mu) T`
/// so the identities cancel exactly.
pub fn quadratic_gap_test(t: &ComplexMatrix, p: MoebiusParams, cfg: &SpectralConfig) -> Result<f64> {
    if p.is_degenerate() {
        return Ok(0.0);
    }
    let d = p.lambda() - p.mu();
    let s = p.lambda().norm_sqr() - p.mu().norm_sqr();
    let x = t.scale(d);
    let gram = t.adjoint().mul(t).scale(Complex64::new(s, 0.0));
    let g = x.add(&x.adjoint()).add(&gram).hermitize();
    Ok(hermitian_max_eig(&g, cfg)?.value)
}

/// `2 h_{W(T^-1)}(lambda - mu) <= |mu|^2 - |lambda|^2`, with `1e-9` slack.
pub fn support_inequality_test(t: &ComplexMatrix, p: MoebiusParams, cfg: &SpectralConfig) -> Result<SupportTest> {
    if p.is_degenerate() {
        return Err(Error::DegenerateParameters);
    }
    let inv = invert_operator(t)?;
    support_with_inverse(&inv, p, cfg)
}

fn invert_operator(t: &ComplexMatrix) -> Result<ComplexMatrix> {
    t.inverse(SINGULAR_RCOND).map_err(|e| match e {
        Error::SingularPencil { rcond } => {
            Error::invalid(format!("T is singular (reciprocal condition estimate {rcond:.3e})"))
        }
        other => other,
    })
}

fn support_with_inverse(inv: &ComplexMatrix, p: MoebiusParams, cfg: &SpectralConfig) -> Result<SupportTest> {
    let lhs = 2.0 * support_function(inv, p.lambda() - p.mu(), cfg)?;
    let rhs = p.mu().norm_sqr() - p.lambda().norm_sqr();
    Ok(SupportTest {
        lhs,
        rhs,
        holds: lhs <= rhs + SUPPORT_SLACK,
    })
}

fn agreement(norm: f64, gap: f64, support: Option<SupportTest>) -> Agreement {
    let by_norm = ((norm - 1.0).abs() > NORM_TIE).then_some(norm <= 1.0);
    let by_support = support.and_then(|s| ((s.lhs - s.rhs).abs() > SUPPORT_TIE).then_some(s.lhs <= s.rhs));
    let by_gap = by_norm.map(|_| gap <= 0.0);
    let cmp = |a: Option<bool>, b: Option<bool>| a.zip(b).map(|(x, y)| x == y);
    Agreement {
        norm_gap: cmp(by_norm, by_gap),
        norm_support: cmp(by_norm, by_support),
        gap_support: cmp(by_gap, by_support),
    }
}

/// All three tests with classification against `band`. `lambda == mu`
/// reports norm 1 and gap 0 with support lhs 0 (`h` is not evaluated at 0).
pub fn contraction_report(
    t: &ComplexMatrix,
    p: MoebiusParams,
    band: f64,
    cfg: &SpectralConfig,
) -> Result<ContractionReport> {
    let direct_norm = direct_norm_test(t, p, cfg)?;
    let quad_gap = quadratic_gap_test(t, p, cfg)?;
    let support = if p.is_degenerate() {
        None
    } else {
        Some(support_inequality_test(t, p, cfg)?)
    };
    Ok(ContractionReport {
        params: p,
        direct_norm,
        quad_gap,
        support_lhs: Support::Finite(support.map_or(0.0, |s| s.lhs)),
        support_rhs: p.mu().norm_sqr() - p.lambda().norm_sqr(),
        classification: Classification::from_norm(direct_norm, band),
        tolerance_band: band,
        agreement: agreement(direct_norm, quad_gap, support),
    })
}

/// Exact answer for `T = V`: `Re mu > 0` and `lambda` on `[-conj(mu), mu)`.
///
/// Computed from the segment parametrization `lambda = -(1-t) conj(mu) + t mu`,
/// `t in [0, 1)`, and cross-checked (in debug builds) against the
/// equivalent form `lambda - mu in (-inf, 0)`, `|lambda| <= |mu|`,
/// `Re mu > 0`. "Real" means `|Im(lambda - mu)| <= 1e-12 (|lambda| + |mu|)`
/// in both.
pub fn volterra_contraction_oracle(p: MoebiusParams) -> Result<bool> {
    if p.is_degenerate() {
        return Err(Error::DegenerateParameters);
    }
    let segment = on_segment(p);
    debug_assert_eq!(segment, on_ray(p), "oracle forms disagree at {p:?}");
    Ok(segment)
}

fn im_matches(p: MoebiusParams) -> bool {
    let (l, m) = (p.lambda(), p.mu());
    (l.im - m.im).abs() <= RAY_TOL * (l.norm() + m.norm())
}

fn on_segment(p: MoebiusParams) -> bool {
    let (l, m) = (p.lambda(), p.mu());
    if !(m.re > 0.0) || !im_matches(p) {
        return false;
    }
    let t = (l.re + m.re) / (2.0 * m.re);
    (0.0..1.0).contains(&t)
}

fn on_ray(p: MoebiusParams) -> bool {
    let (l, m) = (p.lambda(), p.mu());
    let d = l - m;
    // with Im lambda = Im mu, |lambda| <= |mu| compares real parts
    let snapped = Complex64::new(l.re, m.im);
    m.re > 0.0 && im_matches(p) && d.re < 0.0 && snapped.norm() <= m.norm()
}

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]` in the `lambda`-plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Window {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        if !(x0 < x1 && y0 < y1) || ![x0, x1, y0, y1].iter().all(|v| v.is_finite()) {
            return Err(Error::invalid("window needs finite bounds with x0 < x1 and y0 < y1"));
        }
        Ok(Self { x0, x1, y0, y1 })
    }

    /// Grid node `(i, j)` of an `nx x ny` lattice including the corners.
    pub fn node(&self, i: usize, j: usize, nx: usize, ny: usize) -> Complex64 {
        let fx = i as f64 / (nx - 1) as f64;
        let fy = j as f64 / (ny - 1) as f64;
        Complex64::new(self.x0 + fx * (self.x1 - self.x0), self.y0 + fy * (self.y1 - self.y0))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CellOutcome {
    Norm { direct_norm: f64, classification: Classification },
    SingularPencil { rcond: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanCell {
    pub i: usize,
    pub j: usize,
    pub lambda: Complex64,
    pub outcome: CellOutcome,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegionScan {
    pub mu: Complex64,
    pub window: Window,
    pub resolution: (usize, usize),
    pub band: f64,
    /// Row-major in `j` (imaginary part), then `i`.
    pub cells: Vec<ScanCell>,
}

impl RegionScan {
    /// Smallest norm over cells with `lambda != mu`.
    pub fn min_off_diagonal_norm(&self) -> Option<f64> {
        self.cells
            .iter()
            .filter(|c| c.lambda != self.mu)
            .filter_map(|c| match c.outcome {
                CellOutcome::Norm { direct_norm, .. } => Some(direct_norm),
                CellOutcome::SingularPencil { .. } => None,
            })
            .reduce(f64::min)
    }
}

/// `lambda -> (I + lambda T)(I + mu T)^-1` for fixed `T` and `mu`.
///
/// `T` commutes with `R = (I + mu T)^-1`, so each member is `R + lambda T R`
/// and the pencil is factored once.
pub struct MoebiusFamily {
    mu: Complex64,
    pencil: std::result::Result<(ComplexMatrix, ComplexMatrix), f64>,
}

impl MoebiusFamily {
    /// Applies the same conditioning guard as [`direct_norm_test`]; a
    /// singular pencil is reported by [`MoebiusFamily::norm`] rather than here.
    pub fn new(t: &ComplexMatrix, mu: Complex64, cfg: &SpectralConfig) -> Result<Self> {
        let den = t.affine(Complex64::new(1.0, 0.0), mu);
        let pencil = match Factorization::new(&den) {
            None => Err(0.0),
            Some(f) => {
                let rcond = f.rcond(den.norm_one());
                if guard_for(t, mu, cfg)?.is_some() && !(rcond >= SINGULAR_RCOND) {
                    Err(rcond)
                } else {
                    Ok((f.right_divide(&ComplexMatrix::identity(t.dim())), f.right_divide(t)))
                }
            }
        };
        Ok(Self { mu, pencil })
    }

    pub fn mu(&self) -> Complex64 {
        self.mu
    }

    /// Spectral norm at `lambda`; exactly 1 at `lambda = mu`.
    pub fn norm(&self, lambda: Complex64, cfg: &SpectralConfig) -> Result<f64> {
        if lambda == self.mu {
            return Ok(1.0);
        }
        match &self.pencil {
            Err(rcond) => Err(Error::SingularPencil { rcond: *rcond }),
            Ok((r, tr)) => spectral_norm(&r.add(&tr.scale(lambda)), cfg),
        }
    }
}

/// Direct norm and classification at every node of a `nx x ny` grid,
/// through one [`MoebiusFamily`]. A singular pencil marks every cell except
/// `lambda = mu`.
pub fn region_scan(
    t: &ComplexMatrix,
    mu: Complex64,
    window: Window,
    resolution: (usize, usize),
    band: f64,
    cfg: &SpectralConfig,
) -> Result<RegionScan> {
    let (nx, ny) = resolution;
    if nx < 2 || ny < 2 {
        return Err(Error::invalid("resolution must be at least 2 in each axis"));
    }
    if !(band >= 0.0) {
        return Err(Error::invalid("band must be nonnegative"));
    }
    let family = MoebiusFamily::new(t, mu, cfg)?;
    let mut cells = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let lambda = window.node(i, j, nx, ny);
            let outcome = if lambda == mu {
                CellOutcome::Norm {
                    direct_norm: 1.0,
                    classification: Classification::from_norm(1.0, band),
                }
            } else {
                match family.norm(lambda, cfg) {
                    Err(Error::SingularPencil { rcond }) => CellOutcome::SingularPencil { rcond },
                    Err(e) => return Err(e),
                    Ok(norm) => CellOutcome::Norm {
                        direct_norm: norm,
                        classification: Classification::from_norm(norm, band),
                    },
                }
            };
            cells.push(ScanCell { i, j, lambda, outcome });
        }
    }
    Ok(RegionScan {
        mu,
        window,
        resolution,
        band,
        cells,
    })
}

/// `5 |norm(V_N) - norm(V_2N)|` at `lambda = 0`, `mu = 1`.
pub fn calibrate_band(n: usize, cfg: &SpectralConfig) -> Result<f64> {
    let p = MoebiusParams::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))?;
    let coarse = direct_norm_test(build_volterra(n)?.matrix(), p, cfg)?;
    let fine = direct_norm_test(build_volterra(2 * n)?.matrix(), p, cfg)?;
    Ok(5.0 * (coarse - fine).abs())
}

#[derive(Clone, Debug, PartialEq)]
pub struct LumerPhillips {
    /// `(t, ||e^{-tT}||)` per sample.
    pub semigroup_norms: Vec<(f64, f64)>,
    /// `h_{W(T)}(-1)`
    pub left_support: f64,
    /// Every sampled `||e^{-tT}|| <= 1 + 1e-9`.
    pub semigroup_contractive: bool,
    /// `h_{W(T)}(-1) <= 1e-9`, i.e. `W(T)` in the closed right half-plane.
    pub in_right_halfplane: bool,
}

impl LumerPhillips {
    pub fn consistent(&self) -> bool {
        self.semigroup_contractive == self.in_right_halfplane
    }
}

/// Compares contractivity of `e^{-tT}` on the sampled `t` with
/// `W(T)` lying in the right half-plane.
pub fn lumer_phillips_check(t: &ComplexMatrix, t_samples: &[f64], cfg: &SpectralConfig) -> Result<LumerPhillips> {
    if t_samples.is_empty() || t_samples.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
        return Err(Error::invalid("t samples must be positive and finite"));
    }
    let minus = t.scale(Complex64::new(-1.0, 0.0));
    let semigroup_norms = t_samples
        .iter()
        .map(|&s| Ok((s, spectral_norm(&matrix_exponential(&minus, s)?, cfg)?)))
        .collect::<Result<Vec<_>>>()?;
    let left_support = support_function(t, Complex64::new(-1.0, 0.0), cfg)?;
    Ok(LumerPhillips {
        semigroup_contractive: semigroup_norms.iter().all(|&(_, n)| n <= 1.0 + SEMIGROUP_SLACK),
        in_right_halfplane: left_support <= SEMIGROUP_SLACK,
        semigroup_norms,
        left_support,
    })
}

/// One random `(T, lambda, mu)` of the finite-dimensional agreement study.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialRow {
    pub trial: usize,
    pub dim: usize,
    pub lambda: Complex64,
    pub mu: Complex64,
    /// `None` when `I + mu T` failed the conditioning guard.
    pub direct_norm: Option<f64>,
    pub quad_gap: f64,
    pub support_lhs: f64,
    pub support_rhs: f64,
    /// Outside both tie bands and not singular.
    pub judged: bool,
    /// All three verdicts coincide (always true for unjudged rows).
    pub agree: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialSummary {
    pub rows: Vec<TrialRow>,
    pub judged: usize,
    pub disagreements: usize,
}

/// Random trials: `T` from [`random_invertible_matrix`] with dimension drawn
/// from `dims`, `mu` uniform in `[-2, 2]^2`, `lambda = mu + rho e^{i phi}`
/// with `rho` uniform in `(0, 2]`. Deterministic in `seed`.
pub fn run_agreement_trials(
    trials: usize,
    dims: RangeInclusive<usize>,
    seed: u64,
    condition_cap: f64,
    cfg: &SpectralConfig,
) -> Result<TrialSummary> {
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    if dims.is_empty() || *dims.start() == 0 {
        return Err(Error::invalid("dimension range must be nonempty and positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(trials);
    for trial in 0..trials {
        let dim = rng.random_range(dims.clone());
        let t = random_invertible_matrix(dim, rng.random(), condition_cap)?;
        let mu = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let rho: f64 = 2.0 * (1.0 - rng.random::<f64>());
        let lambda = mu + Complex64::from_polar(rho, rng.random_range(0.0..std::f64::consts::TAU));
        let p = MoebiusParams::new(lambda, mu)?;

        let direct_norm = match direct_norm_test(&t, p, cfg) {
            Ok(n) => Some(n),
            Err(Error::SingularPencil { .. }) => None,
            Err(e) => return Err(e),
        };
        let quad_gap = quadratic_gap_test(&t, p, cfg)?;
        let support = support_with_inverse(&invert_operator(&t)?, p, cfg)?;
        let verdicts = direct_norm.map(|n| agreement(n, quad_gap, Some(support)));
        let judged = verdicts.is_some_and(|a| a.norm_gap.is_some() && a.norm_support.is_some());
        let agree = !judged
            || verdicts.is_some_and(|a| a.norm_gap == Some(true) && a.norm_support == Some(true));
        rows.push(TrialRow {
            trial,
            dim,
            lambda,
            mu,
            direct_norm,
            quad_gap,
            support_lhs: support.lhs,
            support_rhs: support.rhs,
            judged,
            agree,
        });
    }
    let judged = rows.iter().filter(|r| r.judged).count();
    let disagreements = rows.iter().filter(|r| !r.agree).count();
    Ok(TrialSummary {
        rows,
        judged,
        disagreements,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::operator_power;
    use proptest::prelude::*;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn params(l: Complex64, m: Complex64) -> MoebiusParams {
        MoebiusParams::new(l, m).unwrap()
    }

    fn cfg() -> SpectralConfig {
        SpectralConfig::default()
    }

    #[test]
    fn scalar_examples() {
        let eye = ComplexMatrix::identity(3);
        let p = params(c(0.3, 0.0), c(0.5, 0.0));
        assert!((direct_norm_test(&eye, p, &cfg()).unwrap() - 1.3 / 1.5).abs() < 1e-14);
        assert!((quadratic_gap_test(&eye, p, &cfg()).unwrap() + 0.56).abs() < 1e-14);
        let s = support_inequality_test(&eye, p, &cfg()).unwrap();
        assert!((s.lhs + 0.4).abs() < 1e-14 && (s.rhs - 0.16).abs() < 1e-14 && s.holds);

        let s = support_inequality_test(&eye, params(c(2.0, 0.0), c(1.0, 0.0)), &cfg()).unwrap();
        assert!((s.lhs - 2.0).abs() < 1e-14 && (s.rhs + 3.0).abs() < 1e-14 && !s.holds);
    }

    #[test]
    fn degenerate_parameters() {
        let t = random_invertible_matrix(4, 2, 1e6).unwrap();
        let p = params(c(0.7, -0.1), c(0.7, -0.1));
        assert_eq!(direct_norm_test(&t, p, &cfg()).unwrap(), 1.0);
        assert_eq!(quadratic_gap_test(&t, p, &cfg()).unwrap(), 0.0);
        assert_eq!(support_inequality_test(&t, p, &cfg()), Err(Error::DegenerateParameters));
        assert_eq!(volterra_contraction_oracle(p), Err(Error::DegenerateParameters));
        let r = contraction_report(&t, p, 1e-2, &cfg()).unwrap();
        assert_eq!(r.classification, Classification::Boundary);
    }

    #[test]
    fn singular_operator_is_invalid_for_support_test() {
        let t = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(
            support_inequality_test(&t, params(c(1.0, 0.0), c(0.5, 0.0)), &cfg()),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn volterra_norm_on_segment() {
        let v = build_volterra(200).unwrap();
        let n = direct_norm_test(v.matrix(), params(c(0.0, 0.0), c(1.0, 0.0)), &cfg()).unwrap();
        assert!((n - 1.0).abs() < 1e-2);
    }

    #[test]
    fn oracle_examples() {
        assert!(volterra_contraction_oracle(params(c(0.5, 0.0), c(1.0, 0.0))).unwrap());
        assert!(volterra_contraction_oracle(params(c(-1.0, 1.0), c(1.0, 1.0))).unwrap());
        assert!(!volterra_contraction_oracle(params(c(0.0, 1.0), c(1.0, 0.0))).unwrap());
        assert!(!volterra_contraction_oracle(params(c(-1.1, 0.0), c(-1.0, 0.0))).unwrap());
        // just past the far end of the segment
        assert!(!volterra_contraction_oracle(params(c(-1.0 - 1e-9, 0.0), c(1.0, 0.0))).unwrap());
        // beyond mu along the ray direction
        assert!(!volterra_contraction_oracle(params(c(1.5, 0.0), c(1.0, 0.0))).unwrap());
    }

    #[test]
    fn oracle_forms_agree_on_random_and_segment_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut hits = 0;
        for k in 0..100_000 {
            let mu = c(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            let lambda = if k % 2 == 0 {
                c(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0))
            } else {
                // on the line through -conj(mu) and mu, t in [-0.5, 1.5)
                let t: f64 = rng.random_range(-0.5..1.5);
                -mu.conj() * (1.0 - t) + mu * t
            };
            if lambda == mu {
                continue;
            }
            let p = params(lambda, mu);
            assert_eq!(on_segment(p), on_ray(p), "{p:?}");
            hits += usize::from(on_segment(p));
        }
        assert!(hits > 10_000);
    }

    #[test]
    fn classification_bands() {
        assert_eq!(Classification::from_norm(1.02, 1e-2), Classification::NonContraction);
        assert_eq!(Classification::from_norm(1.005, 1e-2), Classification::Boundary);
        assert_eq!(Classification::from_norm(0.995, 1e-2), Classification::Boundary);
        assert_eq!(Classification::from_norm(0.9, 1e-2), Classification::Contraction);
    }

    #[test]
    fn report_fields_are_consistent() {
        let t = random_invertible_matrix(5, 9, 1e6).unwrap();
        let r = contraction_report(&t, params(c(0.2, 0.1), c(-0.4, 0.3)), 1e-6, &cfg()).unwrap();
        assert_eq!(r.classification, Classification::from_norm(r.direct_norm, 1e-6));
        assert_eq!(r.agreement.norm_gap, Some(true));
        assert_eq!(r.agreement.norm_support, Some(true));
        assert_eq!(r.agreement.gap_support, Some(true));
    }

    #[test]
    fn identity_scan_matches_scalar_formula() {
        let eye = ComplexMatrix::identity(2);
        let w = Window::new(-3.0, 1.0, -2.0, 2.0).unwrap();
        let scan = region_scan(&eye, c(1.0, 0.0), w, (9, 9), 1e-9, &cfg()).unwrap();
        assert_eq!(scan.cells.len(), 81);
        for cell in &scan.cells {
            let want = (1.0 + cell.lambda).norm() / 2.0;
            match cell.outcome {
                CellOutcome::Norm { direct_norm, classification } => {
                    assert!((direct_norm - want).abs() < 1e-12);
                    assert_eq!(classification, Classification::from_norm(want, 1e-9));
                }
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn scan_cells_match_direct_test() {
        let v = build_volterra(40).unwrap();
        let w = Window::new(-1.5, 1.5, -1.5, 1.5).unwrap();
        let mu = c(1.0, 0.5);
        let scan = region_scan(v.matrix(), mu, w, (5, 4), 1e-2, &cfg()).unwrap();
        for cell in &scan.cells {
            let direct = direct_norm_test(v.matrix(), params(cell.lambda, mu), &cfg()).unwrap();
            match cell.outcome {
                CellOutcome::Norm { direct_norm, .. } => assert!((direct - direct_norm).abs() < 1e-10),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn singular_pencil_cells_are_recorded() {
        let eye = ComplexMatrix::identity(2);
        let w = Window::new(-2.0, 0.0, -1.0, 1.0).unwrap();
        let scan = region_scan(&eye, c(-1.0, 0.0), w, (3, 3), 1e-2, &cfg()).unwrap();
        for cell in &scan.cells {
            if cell.lambda == c(-1.0, 0.0) {
                assert!(matches!(cell.outcome, CellOutcome::Norm { direct_norm, .. } if direct_norm == 1.0));
            } else {
                assert!(matches!(cell.outcome, CellOutcome::SingularPencil { .. }));
            }
        }
        assert!(region_scan(&eye, c(1.0, 0.0), w, (1, 3), 1e-2, &cfg()).is_err());
    }

    #[test]
    fn volterra_scan_structure() {
        let v = build_volterra(60).unwrap();
        let w = Window::new(-1.5, 1.5, -1.5, 1.5).unwrap();
        let scan = region_scan(v.matrix(), c(1.0, 0.0), w, (13, 13), 1e-2, &cfg()).unwrap();
        for cell in &scan.cells {
            let CellOutcome::Norm { direct_norm, classification } = cell.outcome else {
                panic!("volterra pencil is never singular for mu = 1");
            };
            assert_ne!(classification, Classification::Contraction);
            let on_segment = cell.lambda.im.abs() < 1e-12 && cell.lambda.re >= -1.0 && cell.lambda.re < 1.0;
            if on_segment {
                assert!(direct_norm <= 1.0 + 1e-12 && direct_norm > 1.0 - 1e-6, "{cell:?}");
            }
        }
        let v2 = operator_power(&v, 2).unwrap();
        let scan = region_scan(v2.matrix(), c(1.0, 0.0), w, (9, 9), 1e-2, &cfg()).unwrap();
        assert!(scan.min_off_diagonal_norm().unwrap() > 1.0);
    }

    #[test]
    fn band_calibration_is_tiny_for_volterra() {
        // on the segment the discrete norm approaches 1 from below like N^-4
        let band = calibrate_band(50, &cfg()).unwrap();
        assert!(band > 0.0 && band < 1e-6, "{band}");
    }

    #[test]
    fn lumer_phillips_examples() {
        let v = build_volterra(50).unwrap();
        let lp = lumer_phillips_check(v.matrix(), &[0.1, 1.0, 10.0], &cfg()).unwrap();
        assert!(lp.semigroup_contractive && lp.in_right_halfplane && lp.consistent());

        let minus = ComplexMatrix::identity(3).scale(c(-1.0, 0.0));
        let lp = lumer_phillips_check(&minus, &[0.1, 1.0], &cfg()).unwrap();
        assert!(!lp.semigroup_contractive && !lp.in_right_halfplane && lp.consistent());
        assert!((lp.semigroup_norms[1].1 - 1f64.exp()).abs() < 1e-12);

        assert!(lumer_phillips_check(&minus, &[], &cfg()).is_err());
        assert!(lumer_phillips_check(&minus, &[0.0], &cfg()).is_err());
    }

    #[test]
    fn small_agreement_run() {
        let s = run_agreement_trials(60, 2..=5, 4, 1e6, &cfg()).unwrap();
        assert_eq!(s.rows.len(), 60);
        assert_eq!(s.disagreements, 0);
        assert!(s.judged > 50);
        let again = run_agreement_trials(60, 2..=5, 4, 1e6, &cfg()).unwrap();
        assert_eq!(s, again);
        assert!(run_agreement_trials(0, 2..=5, 4, 1e6, &cfg()).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn rotation_substitution_invariance(
            seed in 0u64..500, phi in 0.0..std::f64::consts::TAU,
            lr in -2.0..2.0f64, li in -2.0..2.0f64, mr in -2.0..2.0f64, mi in -2.0..2.0f64,
        ) {
            let t = random_invertible_matrix(4, seed, 1e6).unwrap();
            let p = params(c(lr, li), c(mr, mi));
            let rot = Complex64::from_polar(1.0, phi);
            let q = params(p.lambda() / rot, p.mu() / rot);
            if let (Ok(a), Ok(b)) = (direct_norm_test(&t, p, &cfg()), direct_norm_test(&t.scale(rot), q, &cfg())) {
                prop_assert!((a - b).abs() <= 1e-10 * a.max(1.0));
            }
        }

        #[test]
        fn sign_of_gap_matches_norm(seed in 0u64..500, lr in -2.0..2.0f64, li in -2.0..2.0f64, mr in -2.0..2.0f64, mi in -2.0..2.0f64) {
            let t = random_invertible_matrix(6, seed, 1e6).unwrap();
            let p = params(c(lr, li), c(mr, mi));
            if let Ok(norm) = direct_norm_test(&t, p, &cfg()) {
                if (norm - 1.0).abs() > 1e-8 {
                    let gap = quadratic_gap_test(&t, p, &cfg()).unwrap();
                    prop_assert_eq!(norm <= 1.0, gap <= 0.0);
                }
            }
        }
    }
}
