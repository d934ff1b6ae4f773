//! Dense square complex matrices and the factorizations built on them.

mod factor;

pub(crate) use factor::Factorization;

use std::ops::Index;

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense `dim x dim` complex matrix, row-major, all entries finite.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// # Panics
    /// Panics if `dim == 0`.
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_diag(diag: &[Complex64]) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::invalid("empty diagonal"));
        }
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = d;
        }
        m.check_finite()?;
        Ok(m)
    }

    /// Builds a matrix from `f(row, col)`. Non-finite entries are rejected.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("matrix dimension must be positive"));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        let m = Self { dim, data };
        m.check_finite()?;
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::invalid("matrix has no rows"));
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != dim) {
            return Err(Error::invalid(format!(
                "row {i} has {} entries, expected {dim}",
                r.len()
            )));
        }
        Self::from_fn(dim, |i, j| rows[i][j])
    }

    /// Real-valued convenience constructor, mostly for tests and examples.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    fn check_finite(&self) -> Result<()> {
        if self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::invalid("matrix has non-finite entries"))
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [Complex64] {
        &mut self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, z: Complex64) {
        self.data[i * self.dim + j] = z;
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j];
            }
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * c).collect(),
        }
    }

    /// `a*I + b*self`
    pub fn affine(&self, a: Complex64, b: Complex64) -> Self {
        let mut out = self.scale(b);
        for i in 0..self.dim {
            out.data[i * self.dim + i] += a;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Matrix product. Lower-triangular operands skip their zero blocks.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let n = self.dim;
        let lower = self.is_lower_triangular() && other.is_lower_triangular();
        let mut out = Self::zeros(n);
        for i in 0..n {
            let a_row = self.row(i);
            let out_row = &mut out.data[i * n..(i + 1) * n];
            let k_end = if lower { i + 1 } else { n };
            for (k, &a) in a_row.iter().enumerate().take(k_end) {
                if a == ZERO {
                    continue;
                }
                let j_end = if lower { k + 1 } else { n };
                let b_row = &other.data[k * n..k * n + j_end];
                for (o, &b) in out_row[..j_end].iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `out = self * x`
    pub fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        let n = self.dim;
        debug_assert_eq!(x.len(), n);
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row(i).iter().zip(x).map(|(&a, &b)| a * b).sum();
        }
    }

    /// `out = self^* x`
    pub fn apply_adjoint(&self, x: &[Complex64], out: &mut [Complex64]) {
        out.iter_mut().for_each(|o| *o = ZERO);
        for (i, &xi) in x.iter().enumerate() {
            if xi == ZERO {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += a.conj() * xi;
            }
        }
    }

    /// Rayleigh quotient numerator `<A x, x> = x^* A x`.
    pub fn quadratic_form(&self, x: &[Complex64]) -> Complex64 {
        let mut ax = vec![ZERO; self.dim];
        self.apply(x, &mut ax);
        ax.iter().zip(x).map(|(&a, &b)| a * b.conj()).sum()
    }

    /// `(e^{-i theta} A + e^{i theta} A^*) / 2`, Hermitian by construction.
    pub fn hermitian_part_at(&self, theta: f64) -> Self {
        let n = self.dim;
        let rot = Complex64::from_polar(1.0, -theta);
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let z = 0.5 * (rot * self.data[i * n + j] + (rot * self.data[j * n + i]).conj());
                out.data[i * n + j] = z;
                out.data[j * n + i] = z.conj();
            }
            out.data[i * n + i].im = 0.0;
        }
        out
    }

    /// `(H + H^*) / 2`
    pub fn hermitize(&self) -> Self {
        self.hermitian_part_at(0.0)
    }

    /// `max |H_ij - conj(H_ji)|`
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..=i {
                let d = (self.data[i * n + j] - self.data[j * n + i].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_lower_triangular(&self) -> bool {
        let n = self.dim;
        (0..n).all(|i| self.data[i * n + i + 1..(i + 1) * n].iter().all(|&z| z == ZERO))
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).collect()
    }

    pub fn trace(&self) -> Complex64 {
        self.diagonal().into_iter().sum()
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        let n = self.dim;
        (0..n)
            .map(|j| (0..n).map(|i| self.data[i * n + j].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Inverse via LU (or forward substitution for lower-triangular input).
    /// Fails with [`Error::SingularPencil`] when the reciprocal condition
    /// estimate is below `rcond_floor`.
    pub fn inverse(&self, rcond_floor: f64) -> Result<Self> {
        let f = Factorization::new(self).ok_or(Error::SingularPencil { rcond: 0.0 })?;
        let rcond = f.rcond(self.norm_one());
        if rcond < rcond_floor {
            return Err(Error::SingularPencil { rcond });
        }
        Ok(f.inverse())
    }

    pub(crate) fn to_nalgebra(&self) -> nalgebra::DMatrix<Complex64> {
        nalgebra::DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

pub(crate) fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(&a, &b)| a.conj() * b).sum()
}

pub(crate) fn norm2(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
