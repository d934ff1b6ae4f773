//! Real symmetric tridiagonal eigen-helpers for the Lanczos projections.
//!
//! `diag` has length k, `off` has length k-1 (`off[i]` couples i and i+1).

/// Number of eigenvalues strictly below `x` (Sturm sequence count).
fn count_below(diag: &[f64], off: &[f64], x: f64) -> usize {
    let tiny = f64::MIN_POSITIVE.sqrt();
    let mut count = 0;
    let mut d = 1.0;
    for i in 0..diag.len() {
        let coupling = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        d = diag[i] - x - coupling / d;
        if d == 0.0 {
            d = -tiny;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..diag.len() {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + off.get(i).map_or(0.0, |b| b.abs());
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    (lo, hi)
}

/// Eigenvalue with index `rank` in ascending order, by bisection.
fn kth_eigenvalue(diag: &[f64], off: &[f64], rank: usize) -> f64 {
    let (mut lo, mut hi) = gershgorin(diag, off);
    let pad = f64::EPSILON * lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    lo -= pad;
    hi += pad;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_below(diag, off, mid) > rank {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

pub(crate) fn max_eigenvalue(diag: &[f64], off: &[f64]) -> f64 {
    kth_eigenvalue(diag, off, diag.len() - 1)
}

pub(crate) fn min_eigenvalue(diag: &[f64], off: &[f64]) -> f64 {
    kth_eigenvalue(diag, off, 0)
}

/// Unit eigenvector for the (already accurate) eigenvalue `shift`, by
/// inverse iteration with a partially pivoted tridiagonal solve.
pub(crate) fn eigenvector(diag: &[f64], off: &[f64], shift: f64) -> Vec<f64> {
    let k = diag.len();
    if k == 1 {
        return vec![1.0];
    }
    let (lo, hi) = gershgorin(diag, off);
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    let mut x: Vec<f64> = (0..k).map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64).collect();
    normalize(&mut x);
    for _ in 0..4 {
        x = solve_shifted(diag, off, shift, scale, &x);
        normalize(&mut x);
    }
    x
}

fn normalize(x: &mut [f64]) {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n > 0.0 && n.is_finite() {
        x.iter_mut().for_each(|v| *v /= n);
    }
}

/// Solves `(T - shift I) y = b` with partial pivoting (bands a, b, c and one
/// fill-in superdiagonal).
fn solve_shifted(diag: &[f64], off: &[f64], shift: f64, scale: f64, rhs: &[f64]) -> Vec<f64> {
    let k = diag.len();
    let floor = f64::EPSILON * scale;
    // row i holds u0 (diagonal), u1, u2 after elimination
    let mut u0: Vec<f64> = diag.iter().map(|d| d - shift).collect();
    let mut u1: Vec<f64> = off.to_vec();
    u1.push(0.0);
    let mut u2 = vec![0.0; k];
    let mut lower: Vec<f64> = off.to_vec();
    let mut b = rhs.to_vec();
    for i in 0..k - 1 {
        if lower[i].abs() > u0[i].abs() {
            // swap rows i and i+1
            let (a0, a1, a2) = (u0[i], u1[i], u2[i]);
            u0[i] = lower[i];
            u1[i] = u0[i + 1];
            u2[i] = u1[i + 1];
            let m = a0 / u0[i];
            u0[i + 1] = a1 - m * u1[i];
            u1[i + 1] = a2 - m * u2[i];
            b.swap(i, i + 1);
            b[i + 1] -= m * b[i];
            lower[i] = m;
        } else {
            if u0[i].abs() < floor {
                u0[i] = floor;
            }
            let m = lower[i] / u0[i];
            u0[i + 1] -= m * u1[i];
            u1[i + 1] -= m * u2[i];
            b[i + 1] -= m * b[i];
            lower[i] = m;
        }
    }
    if u0[k - 1].abs() < floor {
        u0[k - 1] = floor;
    }
    let mut y = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = b[i];
        if i + 1 < k {
            s -= u1[i] * y[i + 1];
        }
        if i + 2 < k {
            s -= u2[i] * y[i + 2];
        }
        y[i] = s / u0[i];
    }
    y
}
