//! Reference boundary of `W(V)`: the region bounded by the vertical segment
//! `[-i/2pi, i/2pi]` and the arcs `t -> (1 - cos t)/t^2 ± i (t - sin t)/t^2`,
//! `t in [0, 2pi]`, and its comparison with the computed range of `V_N`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{numerical_range_boundary, NumericalRangeBoundary};
use crate::operators::{DiscretizedOperator, OperatorKind};
use crate::spectral::SpectralConfig;

/// Below this `t` both components come from their Taylor series.
const SERIES_CUTOFF: f64 = 1e-3;
const REFERENCE_T_COUNT: usize = 2048;
const SEGMENT_POINTS: usize = 65;

/// Point on the upper (`branch = 1`) or lower (`branch = -1`) arc.
pub fn wv_boundary_point(t: f64, branch: i8) -> Result<Complex64> {
    if !(0.0..=TAU).contains(&t) {
        return Err(Error::invalid("t must lie in [0, 2pi]"));
    }
    if branch != 1 && branch != -1 {
        return Err(Error::invalid("branch must be +1 or -1"));
    }
    let (re, im) = if t < SERIES_CUTOFF {
        let t2 = t * t;
        // six terms each of (1 - cos t)/t^2 and (t - sin t)/t^2
        let re = 0.5 - t2 / 24.0 + t2 * t2 / 720.0 - t2.powi(3) / 40320.0 + t2.powi(4) / 3628800.0
            - t2.powi(5) / 479001600.0;
        let im = t
            * (1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0 - t2.powi(3) / 362880.0 + t2.powi(4) / 39916800.0
                - t2.powi(5) / 6227020800.0);
        (re, im)
    } else {
        ((1.0 - t.cos()) / (t * t), (t - t.sin()) / (t * t))
    };
    Ok(Complex64::new(re, f64::from(branch) * im))
}

/// Dense samples of the closed reference curve, traversed counter-clockwise
/// from `1/2`: upper arc, vertical segment downwards, lower arc back.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceBoundary {
    samples: Vec<Complex64>,
    param_grid: Vec<f64>,
}

impl Default for ReferenceBoundary {
    fn default() -> Self {
        Self::new()
    }
}

impl ReferenceBoundary {
    /// 2048 values of `t`, clustered toward both ends of `[0, 2pi]`.
    pub fn new() -> Self {
        let m = REFERENCE_T_COUNT;
        let param_grid: Vec<f64> = (0..m)
            .map(|k| PI * (1.0 - (PI * k as f64 / (m - 1) as f64).cos()))
            .map(|t| t.clamp(0.0, TAU))
            .collect();
        let arc = |branch: i8| param_grid.iter().map(move |&t| wv_boundary_point(t, branch).expect("t in range"));
        let top = 1.0 / TAU;
        let mut samples: Vec<Complex64> = arc(1).collect();
        samples.extend(
            (1..SEGMENT_POINTS - 1)
                .map(|k| Complex64::new(0.0, top - 2.0 * top * k as f64 / (SEGMENT_POINTS - 1) as f64)),
        );
        samples.extend(arc(-1).collect::<Vec<_>>().into_iter().rev());
        Self { samples, param_grid }
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn param_grid(&self) -> &[f64] {
        &self.param_grid
    }

    /// Support of the sampled curve in direction `e^{i theta}`.
    pub fn support(&self, theta: f64) -> f64 {
        let rot = Complex64::from_polar(1.0, -theta);
        self.samples.iter().map(|&w| (rot * w).re).fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct AngleDeviation {
    pub theta: f64,
    pub computed: f64,
    pub reference: f64,
}

#[derive(Clone, Debug)]
pub struct WvComparison {
    pub max_deviation: f64,
    pub per_angle: Vec<AngleDeviation>,
    pub boundary: NumericalRangeBoundary,
}

/// Support values of `W(V_N)` against the reference curve, at every
/// direction the boundary sampler visited.
pub fn compare_wv(t: &DiscretizedOperator, num_angles: usize, cfg: &SpectralConfig) -> Result<WvComparison> {
    if t.kind() != OperatorKind::VolterraPower(1) {
        return Err(Error::invalid("compare_wv needs the discretized Volterra operator itself"));
    }
    let boundary = numerical_range_boundary(t.matrix(), num_angles, cfg)?;
    let reference = ReferenceBoundary::new();
    let per_angle: Vec<AngleDeviation> = boundary
        .samples()
        .iter()
        .map(|s| AngleDeviation {
            theta: s.theta,
            computed: s.support,
            reference: reference.support(s.theta),
        })
        .collect();
    let max_deviation = per_angle
        .iter()
        .map(|d| (d.computed - d.reference).abs())
        .fold(0.0, f64::max);
    Ok(WvComparison {
        max_deviation,
        per_angle,
        boundary,
    })
}
