//! Lanczos iteration with full reorthogonalization for the top eigenpair of
//! a Hermitian operator given only through its action on vectors.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::tridiag;
use crate::linalg::{dot, norm2};

/// Krylov breakdown threshold, relative to the spectral scale seen so far.
const BREAKDOWN: f64 = 1e-13;

#[derive(Clone, Copy, Debug)]
pub(crate) enum StopRule {
    /// `||H v - theta v|| <= tol * (1 + scale)`
    Residual(f64),
    /// relative change of the top Ritz value below `tol` on two consecutive
    /// steps (or a relative residual below `tol`)
    Stagnation(f64),
}

#[derive(Clone, Debug)]
pub(crate) struct TopPair {
    pub value: f64,
    pub vector: Vec<Complex64>,
    pub steps: usize,
    pub converged: bool,
}

struct BlockResult {
    theta: f64,
    vector: Vec<Complex64>,
}

/// Fixed start vectors: the second is only used after a Krylov breakdown.
fn start_vector(dim: usize, which: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6c61_6e63_7a6f_7300 + which);
    (0..dim)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re, im)
        })
        .collect()
}

fn orthogonalize(w: &mut [Complex64], basis: &[Vec<Complex64>]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, w);
            for (x, &qi) in w.iter_mut().zip(q) {
                *x -= c * qi;
            }
        }
    }
}

fn ritz_vector(basis: &[Vec<Complex64>], coeffs: &[f64]) -> Vec<Complex64> {
    let dim = basis[0].len();
    let mut v = vec![Complex64::new(0.0, 0.0); dim];
    for (q, &s) in basis.iter().zip(coeffs) {
        for (x, &qi) in v.iter_mut().zip(q) {
            *x += qi * s;
        }
    }
    let n = norm2(&v);
    v.iter_mut().for_each(|x| *x /= n);
    v
}

pub(crate) fn top_eigenpair(
    dim: usize,
    mut apply: impl FnMut(&[Complex64], &mut [Complex64]),
    rule: StopRule,
    max_steps: usize,
) -> TopPair {
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    let mut finished: Vec<BlockResult> = Vec::new();
    let mut steps = 0usize;
    let mut w = vec![Complex64::new(0.0, 0.0); dim];
    let mut converged = false;
    let mut scale = 0.0f64;

    'blocks: for which in 1..=2u64 {
        let mut q = start_vector(dim, which);
        orthogonalize(&mut q, &basis);
        let n = norm2(&q);
        if n < 1e-8 * (dim as f64).sqrt() {
            break;
        }
        q.iter_mut().for_each(|x| *x /= n);

        let offset = basis.len();
        let mut diag: Vec<f64> = Vec::new();
        let mut off: Vec<f64> = Vec::new();
        let mut prev_theta: Option<f64> = None;
        let mut flat_steps = 0;

        loop {
            apply(&q, &mut w);
            steps += 1;
            let alpha = dot(&q, &w).re;
            for (x, &qi) in w.iter_mut().zip(&q) {
                *x -= qi * alpha;
            }
            basis.push(q);
            orthogonalize(&mut w, &basis);
            let beta = norm2(&w);
            diag.push(alpha);

            let theta = tridiag::max_eigenvalue(&diag, &off);
            let theta_min = tridiag::min_eigenvalue(&diag, &off);
            scale = scale.max(theta.abs()).max(theta_min.abs());
            let s = tridiag::eigenvector(&diag, &off, theta);
            let resid = beta * s.last().map_or(0.0, |x| x.abs());

            let exhausted = basis.len() == dim;
            let breakdown = beta <= BREAKDOWN * scale;
            let settled = match rule {
                StopRule::Residual(tol) => resid <= tol * (1.0 + scale),
                StopRule::Stagnation(tol) => {
                    if prev_theta.is_some_and(|p| (theta - p).abs() <= tol * theta.abs()) {
                        flat_steps += 1;
                    } else {
                        flat_steps = 0;
                    }
                    flat_steps >= 2 || resid <= tol * theta.abs()
                }
            };
            prev_theta = Some(theta);

            if exhausted || breakdown || settled || steps >= max_steps {
                finished.push(BlockResult {
                    theta,
                    vector: ritz_vector(&basis[offset..], &s),
                });
                if exhausted || settled {
                    converged = true;
                    break 'blocks;
                }
                if steps >= max_steps {
                    break 'blocks;
                }
                // breakdown: the block spans an invariant subspace, whose top
                // pair is exact; look once more in its complement
                converged = true;
                continue 'blocks;
            }
            off.push(beta);
            q = w.iter().map(|&x| x / beta).collect();
        }
    }

    let best = finished
        .into_iter()
        .max_by(|a, b| a.theta.total_cmp(&b.theta))
        .expect("at least one Lanczos step");
    apply(&best.vector, &mut w);
    let value = dot(&best.vector, &w).re;
    TopPair {
        value,
        vector: best.vector,
        steps,
        converged,
    }
}
