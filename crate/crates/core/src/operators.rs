//! The operators under study: the discretized Volterra operator and its
//! powers, Möbius transforms, and random test matrices.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Factorization};
use crate::tolerances::SINGULAR_RCOND;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorKind {
    /// `V^n` for the midpoint discretization of `Vf(x) = int_0^x f`.
    VolterraPower(u32),
    Custom,
}

/// A matrix tagged with its grid size `N`, step `h = 1/N` and origin.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscretizedOperator {
    matrix: ComplexMatrix,
    grid_n: usize,
    step: f64,
    kind: OperatorKind,
}

impl DiscretizedOperator {
    /// Wraps an arbitrary matrix, using its dimension as the grid size.
    pub fn custom(matrix: ComplexMatrix) -> Self {
        let grid_n = matrix.dim();
        Self {
            matrix,
            grid_n,
            step: 1.0 / grid_n as f64,
            kind: OperatorKind::Custom,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn grid_n(&self) -> usize {
        self.grid_n
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }
}

/// Samples of a function at the midpoints `x_j = (j - 1/2) h`, `j = 1..N`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("grid function needs at least one sample"));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("grid function samples must be finite"));
        }
        Ok(Self { values })
    }

    pub fn sample(grid_n: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let h = 1.0 / grid_n as f64;
        Self::new((0..grid_n).map(|j| f((j as f64 + 0.5) * h)).collect())
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn grid_n(&self) -> usize {
        self.values.len()
    }

    pub fn step(&self) -> f64 {
        1.0 / self.values.len() as f64
    }
}

/// The pair `(lambda, mu)` of `(I + lambda T)(I + mu T)^-1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MoebiusParams {
    lambda: Complex64,
    mu: Complex64,
}

impl MoebiusParams {
    pub fn new(lambda: Complex64, mu: Complex64) -> Result<Self> {
        if !(lambda.re.is_finite() && lambda.im.is_finite() && mu.re.is_finite() && mu.im.is_finite()) {
            return Err(Error::invalid("lambda and mu must be finite"));
        }
        Ok(Self { lambda, mu })
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn mu(&self) -> Complex64 {
        self.mu
    }

    /// `lambda == mu`, compared exactly.
    pub fn is_degenerate(&self) -> bool {
        self.lambda == self.mu
    }
}

/// Midpoint collocation of `Vf(x) = int_0^x f`: `h` below the diagonal,
/// `h/2` on it. `V + V^*` is exactly `h` times the all-ones matrix.
pub fn build_volterra(n: usize) -> Result<DiscretizedOperator> {
    if n == 0 {
        return Err(Error::invalid("grid size must be positive"));
    }
    let h = 1.0 / n as f64;
    let matrix = ComplexMatrix::from_fn(n, |i, j| {
        let v = match i.cmp(&j) {
            std::cmp::Ordering::Greater => h,
            std::cmp::Ordering::Equal => 0.5 * h,
            std::cmp::Ordering::Less => 0.0,
        };
        Complex64::new(v, 0.0)
    })?;
    Ok(DiscretizedOperator {
        matrix,
        grid_n: n,
        step: h,
        kind: OperatorKind::VolterraPower(1),
    })
}

pub fn operator_power(t: &DiscretizedOperator, n: u32) -> Result<DiscretizedOperator> {
    if n == 0 {
        return Err(Error::invalid("power must be at least 1"));
    }
    let mut result: Option<ComplexMatrix> = None;
    let mut base = t.matrix.clone();
    let mut e = n;
    loop {
        if e & 1 == 1 {
            result = Some(match result {
                None => base.clone(),
                Some(r) => r.mul(&base),
            });
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        base = base.mul(&base);
    }
    let kind = match t.kind {
        OperatorKind::VolterraPower(k) => OperatorKind::VolterraPower(k * n),
        OperatorKind::Custom => OperatorKind::Custom,
    };
    Ok(DiscretizedOperator {
        matrix: result.expect("n >= 1"),
        grid_n: t.grid_n,
        step: t.step,
        kind,
    })
}

/// `(I + lambda T)(I + mu T)^-1`, by solving against `I + mu T`.
///
/// Fails with [`Error::SingularPencil`] when the reciprocal condition
/// estimate of `I + mu T` is below `1e-12`.
pub fn moebius_transform(t: &ComplexMatrix, p: MoebiusParams) -> Result<ComplexMatrix> {
    moebius_with_floor(t, p, Some(SINGULAR_RCOND))
}

/// As [`moebius_transform`], with the conditioning guard optional. Without
/// the guard only an exact zero pivot fails.
pub(crate) fn moebius_with_floor(
    t: &ComplexMatrix,
    p: MoebiusParams,
    rcond_floor: Option<f64>,
) -> Result<ComplexMatrix> {
    let one = Complex64::new(1.0, 0.0);
    let num = t.affine(one, p.lambda());
    let den = t.affine(one, p.mu());
    let f = Factorization::new(&den).ok_or(Error::SingularPencil { rcond: 0.0 })?;
    if let Some(floor) = rcond_floor {
        let rcond = f.rcond(den.norm_one());
        if !(rcond >= floor) {
            return Err(Error::SingularPencil { rcond });
        }
    }
    Ok(f.right_divide(&num))
}

const GENERATION_ATTEMPTS: usize = 100;

/// Deterministic complex Gaussian matrix (entries with unit variance),
/// redrawn until its smallest singular value is at least `1e-3 / sqrt(dim)`
/// and its condition number is at most `condition_cap`.
pub fn random_invertible_matrix(dim: usize, seed: u64, condition_cap: f64) -> Result<ComplexMatrix> {
    if dim == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    if !(condition_cap >= 1.0) {
        return Err(Error::invalid("condition cap must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("valid normal");
    let threshold = 1e-3 / (dim as f64).sqrt();
    for _ in 0..GENERATION_ATTEMPTS {
        let m = ComplexMatrix::from_fn(dim, |_, _| {
            Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng))
        })?;
        let sv = m.to_nalgebra().singular_values();
        let (smin, smax) = (sv.min(), sv.max());
        if smin >= threshold && smax <= condition_cap * smin {
            return Ok(m);
        }
    }
    Err(Error::GenerationFailure {
        attempts: GENERATION_ATTEMPTS,
    })
}
