use num_complex::Complex64;

use super::{ComplexMatrix, ZERO};

/// Solver for `A x = b` and `A^* x = b`.
///
/// Lower-triangular matrices (every Volterra power and every `I + mu*V^n`)
/// are solved by substitution directly; anything else goes through LU with
/// partial pivoting.
pub(crate) enum Factorization {
    Lower {
        lower: ComplexMatrix,
        /// `lower^*`, stored so both substitutions walk contiguous rows.
        upper: ComplexMatrix,
    },
    Lu {
        lu: ComplexMatrix,
        /// Row `i` of `PA` is row `perm[i]` of `A`.
        perm: Vec<usize>,
    },
}

impl Factorization {
    /// `None` when an exact zero pivot appears.
    pub fn new(a: &ComplexMatrix) -> Option<Self> {
        if a.is_lower_triangular() {
            if a.diagonal().iter().any(|&d| d == ZERO) {
                return None;
            }
            return Some(Factorization::Lower {
                lower: a.clone(),
                upper: a.adjoint(),
            });
        }
        let n = a.dim();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot == 0.0 {
                return None;
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu.set(k, j, lu[(p, j)]);
                    lu.set(p, j, tmp);
                }
                perm.swap(k, p);
            }
            let inv_pivot = lu[(k, k)].inv();
            let (head, tail) = lu.data.split_at_mut((k + 1) * n);
            let pivot_row = &head[k * n..(k + 1) * n];
            for row in tail.chunks_exact_mut(n) {
                let l = row[k] * inv_pivot;
                row[k] = l;
                if l == ZERO {
                    continue;
                }
                for (r, &u) in row[k + 1..].iter_mut().zip(&pivot_row[k + 1..]) {
                    *r -= l * u;
                }
            }
        }
        Some(Factorization::Lu { lu, perm })
    }

    pub fn dim(&self) -> usize {
        match self {
            Factorization::Lower { lower, .. } => lower.dim(),
            Factorization::Lu { lu, .. } => lu.dim(),
        }
    }

    /// Overwrites `b` with `A^{-1} b`.
    pub fn solve(&self, b: &mut [Complex64]) {
        match self {
            Factorization::Lower { lower, .. } => forward_substitute(lower, b, false),
            Factorization::Lu { lu, perm } => {
                let mut y: Vec<Complex64> = perm.iter().map(|&p| b[p]).collect();
                forward_substitute(lu, &mut y, true);
                back_substitute(lu, &mut y, false);
                b.copy_from_slice(&y);
            }
        }
    }

    /// Overwrites `b` with `A^{-*} b`.
    pub fn solve_adjoint(&self, b: &mut [Complex64]) {
        match self {
            Factorization::Lower { upper, .. } => back_substitute(upper, b, false),
            Factorization::Lu { lu, perm } => {
                // A^* = U^* L^* P
                let n = lu.dim();
                for i in 0..n {
                    let s: Complex64 = (0..i).map(|k| lu[(k, i)].conj() * b[k]).sum();
                    b[i] = (b[i] - s) / lu[(i, i)].conj();
                }
                for i in (0..n).rev() {
                    let s: Complex64 = (i + 1..n).map(|k| lu[(k, i)].conj() * b[k]).sum();
                    b[i] -= s;
                }
                let mut x = vec![ZERO; n];
                for (i, &p) in perm.iter().enumerate() {
                    x[p] = b[i];
                }
                b.copy_from_slice(&x);
            }
        }
    }

    /// Solves `X A = B` for `X`, i.e. returns `B A^{-1}`, row by row.
    pub fn right_divide(&self, b: &ComplexMatrix) -> ComplexMatrix {
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(n);
        let lower_b = b.is_lower_triangular();
        for i in 0..n {
            // x A = b_i  <=>  A^* conj(x)^T = conj(b_i)^T
            let mut r: Vec<Complex64> = b.row(i).iter().map(|z| z.conj()).collect();
            match self {
                // Row i of B and of X vanish past column i, and the leading
                // block of a lower-triangular A is self-contained.
                Factorization::Lower { upper, .. } if lower_b => {
                    back_substitute_prefix(upper, &mut r[..=i]);
                }
                _ => self.solve_adjoint(&mut r),
            }
            for (o, z) in out.row_mut(i).iter_mut().zip(r) {
                *o = z.conj();
            }
        }
        out
    }

    pub fn inverse(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut inv_t = ComplexMatrix::zeros(n);
        for j in 0..n {
            let col = inv_t.row_mut(j);
            col[j] = Complex64::new(1.0, 0.0);
            self.solve(col);
        }
        inv_t.transpose()
    }

    /// Reciprocal condition estimate in the 1-norm (Hager/Higham estimator
    /// for `||A^{-1}||_1`).
    pub fn rcond(&self, norm_one: f64) -> f64 {
        let n = self.dim();
        if norm_one == 0.0 {
            return 0.0;
        }
        let mut x = vec![Complex64::new(1.0 / n as f64, 0.0); n];
        let mut estimate = 0.0f64;
        for _ in 0..5 {
            let mut y = x.clone();
            self.solve(&mut y);
            let est = y.iter().map(|z| z.norm()).sum::<f64>();
            if !est.is_finite() {
                return 0.0;
            }
            if est <= estimate {
                break;
            }
            estimate = est;
            let mut z: Vec<Complex64> = y
                .iter()
                .map(|&v| {
                    let m = v.norm();
                    if m == 0.0 {
                        Complex64::new(1.0, 0.0)
                    } else {
                        v / m
                    }
                })
                .collect();
            self.solve_adjoint(&mut z);
            let (j, zmax) = z
                .iter()
                .map(|v| v.norm())
                .enumerate()
                .fold((0, -1.0), |b, c| if c.1 > b.1 { c } else { b });
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| (a.conj() * b).re).sum();
            if zmax <= ztx {
                break;
            }
            x = vec![ZERO; n];
            x[j] = Complex64::new(1.0, 0.0);
        }
        1.0 / (norm_one * estimate)
    }
}

fn forward_substitute(l: &ComplexMatrix, b: &mut [Complex64], unit: bool) {
    for i in 0..b.len() {
        let row = l.row(i);
        let s: Complex64 = row[..i].iter().zip(&b[..i]).map(|(&a, &x)| a * x).sum();
        b[i] -= s;
        if !unit {
            b[i] /= row[i];
        }
    }
}

fn back_substitute(u: &ComplexMatrix, b: &mut [Complex64], unit: bool) {
    let n = b.len();
    for i in (0..n).rev() {
        let row = u.row(i);
        let s: Complex64 = row[i + 1..n].iter().zip(&b[i + 1..]).map(|(&a, &x)| a * x).sum();
        b[i] -= s;
        if !unit {
            b[i] /= row[i];
        }
    }
}

/// Back substitution against the leading `b.len()` block of upper-triangular `u`.
fn back_substitute_prefix(u: &ComplexMatrix, b: &mut [Complex64]) {
    let m = b.len();
    for i in (0..m).rev() {
        let row = u.row(i);
        let s: Complex64 = row[i + 1..m].iter().zip(&b[i + 1..]).map(|(&a, &x)| a * x).sum();
        b[i] = (b[i] - s) / row[i];
    }
}
