//! Numerical ranges, support functions and convex-region predicates.
//!
//! `W(A)` is sampled by the rotation method: for each direction `theta` the
//! top eigenpair of `H(theta) = (e^{-i theta} A + e^{i theta} A^*)/2` gives
//! the support value `h(e^{i theta})` and an attained boundary point
//! `<A v, v>`. Support functions follow `h(z) = sup Re(z * conj(w))`.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::spectral::{hermitian_max_eig, SpectralConfig};
use crate::tolerances::RAY_ANGLE_TOL;

/// Adjacent boundary points farther apart than this multiple of the median
/// spacing get a bisecting angle.
const REFINE_RATIO: f64 = 10.0;
const REFINE_DEPTH: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundarySample {
    pub theta: f64,
    pub support: f64,
    pub point: Complex64,
}

/// Sampled boundary of a numerical range, ordered by angle in `[0, 2pi)`.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericalRangeBoundary {
    samples: Vec<BoundarySample>,
    source_dim: usize,
}

impl NumericalRangeBoundary {
    pub fn samples(&self) -> &[BoundarySample] {
        &self.samples
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn points(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.samples.iter().map(|s| s.point)
    }

    /// Support of the sampled polygon in direction `e^{i theta}`.
    pub fn polygon_support(&self, theta: f64) -> f64 {
        let rot = Complex64::from_polar(1.0, -theta);
        self.points().map(|w| (rot * w).re).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn rightmost(&self) -> Complex64 {
        self.extreme(|w| w.re)
    }

    pub fn topmost(&self) -> Complex64 {
        self.extreme(|w| w.im)
    }

    fn extreme(&self, key: impl Fn(Complex64) -> f64) -> Complex64 {
        self.points()
            .max_by(|a, b| key(*a).total_cmp(&key(*b)))
            .expect("boundary has samples")
    }

    /// Polygon vertices with points interior to a straight edge removed
    /// (on a flat face the eigensolver may return any point of the face).
    pub fn vertices(&self) -> Vec<Complex64> {
        let scale = self.points().map(|w| w.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let mut out: Vec<Complex64> = Vec::with_capacity(self.samples.len());
        for w in self.points() {
            if out.last().is_some_and(|p| (w - p).norm() <= 1e-12 * scale) {
                continue;
            }
            while out.len() >= 2 {
                let (a, b) = (out[out.len() - 2], out[out.len() - 1]);
                if !is_between(a, b, w, scale) {
                    break;
                }
                out.pop();
            }
            out.push(w);
        }
        // wrap-around: the first and last kept points may be interior too
        loop {
            let n = out.len();
            if n < 3 {
                break;
            }
            if (out[0] - out[n - 1]).norm() <= 1e-12 * scale {
                out.pop();
            } else if is_between(out[n - 2], out[n - 1], out[0], scale) {
                out.pop();
            } else if is_between(out[n - 1], out[0], out[1], scale) {
                out.remove(0);
            } else {
                break;
            }
        }
        out
    }

    /// Endpoints of the longest polygon edge. On a range with a flat face
    /// this is the face, once refinement has resolved its corners.
    pub fn longest_edge(&self) -> (Complex64, Complex64) {
        let v = self.vertices();
        let n = v.len();
        (0..n)
            .map(|k| (v[k], v[(k + 1) % n]))
            .max_by(|a, b| (a.1 - a.0).norm().total_cmp(&(b.1 - b.0).norm()))
            .expect("boundary has samples")
    }
}

/// Whether `b` lies on the segment from `a` to `c`, allowing a sideways
/// offset of `1e-6` times the segment length (far below the turning angle
/// between sampled directions).
fn is_between(a: Complex64, b: Complex64, c: Complex64, scale: f64) -> bool {
    let ac = c - a;
    let ab = b - a;
    let len = ac.norm();
    if len == 0.0 {
        return false;
    }
    let cross = (ac.conj() * ab).im / len;
    let along = (ac.conj() * ab).re / (len * len);
    cross.abs() <= 1e-6 * len + 1e-14 * scale && along > 0.0 && along < 1.0
}

/// `h_Omega(z)` for possibly unbounded `Omega`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Support {
    Finite(f64),
    Infinite,
}

impl Support {
    pub fn is_finite(&self) -> bool {
        matches!(self, Support::Finite(_))
    }

    /// The value, with `+inf` for [`Support::Infinite`].
    pub fn value(&self) -> f64 {
        match *self {
            Support::Finite(v) => v,
            Support::Infinite => f64::INFINITY,
        }
    }
}

/// A support value together with the direction it was taken in.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupportQuery {
    pub direction: Complex64,
    pub value: Support,
}

impl SupportQuery {
    pub fn of_matrix(a: &ComplexMatrix, z: Complex64, cfg: &SpectralConfig) -> Result<Self> {
        Ok(Self {
            direction: z,
            value: Support::Finite(support_function(a, z, cfg)?),
        })
    }

    pub fn of_halfplane(z: Complex64) -> Self {
        Self {
            direction: z,
            value: halfplane_support(z),
        }
    }
}

fn sample_at(a: &ComplexMatrix, theta: f64, cfg: &SpectralConfig) -> Result<BoundarySample> {
    let top = hermitian_max_eig(&a.hermitian_part_at(theta), cfg)?;
    Ok(BoundarySample {
        theta,
        support: top.value,
        point: a.quadratic_form(&top.vector),
    })
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    xs[xs.len() / 2]
}

/// Boundary of `W(a)` at `num_angles` equally spaced directions, plus
/// bisecting directions wherever adjacent boundary points are far apart
/// (up to six rounds).
pub fn numerical_range_boundary(
    a: &ComplexMatrix,
    num_angles: usize,
    cfg: &SpectralConfig,
) -> Result<NumericalRangeBoundary> {
    if num_angles < 8 {
        return Err(Error::invalid("at least 8 angles are required"));
    }
    let mut samples = (0..num_angles)
        .map(|k| sample_at(a, TAU * k as f64 / num_angles as f64, cfg))
        .collect::<Result<Vec<_>>>()?;

    let gap = |s: &[BoundarySample], k: usize| (s[(k + 1) % s.len()].point - s[k].point).norm();
    let base_spacing = median((0..samples.len()).map(|k| gap(&samples, k)).collect());
    let diameter = samples
        .iter()
        .flat_map(|p| samples.iter().map(move |q| (p.point - q.point).norm()))
        .fold(0.0, f64::max);
    let threshold = (REFINE_RATIO * base_spacing).max(1e-6 * diameter);
    let min_step = TAU / num_angles as f64 / (1u64 << REFINE_DEPTH) as f64;

    for _ in 0..REFINE_DEPTH {
        let n = samples.len();
        let mut fresh = Vec::new();
        for k in 0..n {
            let t0 = samples[k].theta;
            let t1 = if k + 1 < n { samples[k + 1].theta } else { samples[0].theta + TAU };
            if gap(&samples, k) > threshold && t1 - t0 > 1.5 * min_step {
                let mid = 0.5 * (t0 + t1);
                fresh.push(sample_at(a, if mid >= TAU { mid - TAU } else { mid }, cfg)?);
            }
        }
        if fresh.is_empty() {
            break;
        }
        samples.extend(fresh);
        samples.sort_by(|p, q| p.theta.total_cmp(&q.theta));
    }

    Ok(NumericalRangeBoundary {
        samples,
        source_dim: a.dim(),
    })
}

/// `h_{W(a)}(z) = |z| lambda_max(H(arg z))`.
pub fn support_function(a: &ComplexMatrix, z: Complex64, cfg: &SpectralConfig) -> Result<f64> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::invalid("support direction must be nonzero"));
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::invalid("support direction must be finite"));
    }
    let top = hermitian_max_eig(&a.hermitian_part_at(z.arg()), cfg)?;
    Ok(z.norm() * top.value)
}

/// Support function of the closed right half-plane: 0 on the closed
/// negative real axis, infinite elsewhere.
///
/// `z` counts as a nonpositive real when `Re z < 0` and
/// `|Im z| <= 1e-12 * max(1, |z|)`. `z = 0` gives 0.
pub fn halfplane_support(z: Complex64) -> Support {
    if z == Complex64::new(0.0, 0.0) {
        return Support::Finite(0.0);
    }
    if z.re < 0.0 && z.im.abs() <= RAY_ANGLE_TOL * z.norm().max(1.0) {
        Support::Finite(0.0)
    } else {
        Support::Infinite
    }
}

/// Whether `Re(w e^{-i theta}) <= support(theta) + slack` at every sample.
pub fn hull_contains(boundary: &NumericalRangeBoundary, w: Complex64, slack: f64) -> bool {
    boundary
        .samples
        .iter()
        .all(|s| (Complex64::from_polar(1.0, -s.theta) * w).re <= s.support + slack)
}
