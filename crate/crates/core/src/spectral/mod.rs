//! Spectral kernels: operator norm, extremal Hermitian eigenpairs, the full
//! spectrum and the matrix exponential.

mod expm;
pub(crate) mod lanczos;
mod tridiag;

pub use expm::matrix_exponential;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::tolerances::HERMITIAN_DEFECT;
use lanczos::{top_eigenpair, StopRule};

/// Tolerances for the iterative kernels.
///
/// `power_iter_tol` and `power_iter_max` govern the norm iteration on
/// `A^* A`: it stops once the top Ritz value changes by less than
/// `power_iter_tol` (relative) on consecutive steps. `eig_tol` is the
/// residual tolerance for Hermitian eigenpairs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralConfig {
    pub power_iter_tol: f64,
    pub power_iter_max: usize,
    pub eig_tol: f64,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self {
            power_iter_tol: 1e-12,
            power_iter_max: 10_000,
            eig_tol: 1e-11,
        }
    }
}

impl SpectralConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.power_iter_tol > 0.0 && self.eig_tol > 0.0) {
            return Err(Error::invalid("spectral tolerances must be positive"));
        }
        if self.power_iter_max == 0 {
            return Err(Error::invalid("power_iter_max must be positive"));
        }
        Ok(())
    }
}

/// Largest eigenvalue of a Hermitian matrix with a unit eigenvector.
///
/// With a repeated top eigenvalue the vector is some unit vector of the
/// top eigenspace; nothing about which one is promised.
#[derive(Clone, Debug)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: Vec<Complex64>,
}

/// Largest singular value of `a`.
pub fn spectral_norm(a: &ComplexMatrix, cfg: &SpectralConfig) -> Result<f64> {
    cfg.validate()?;
    let n = a.dim();
    let mut tmp = vec![Complex64::new(0.0, 0.0); n];
    let top = top_eigenpair(
        n,
        |x, y| {
            a.apply(x, &mut tmp);
            a.apply_adjoint(&tmp, y);
        },
        StopRule::Stagnation(cfg.power_iter_tol),
        cfg.power_iter_max,
    );
    let sigma = top.value.max(0.0).sqrt();
    if !top.converged {
        return Err(Error::ConvergenceFailure {
            iterations: top.steps,
            last_estimate: sigma,
        });
    }
    Ok(sigma)
}

pub fn hermitian_max_eig(h: &ComplexMatrix, cfg: &SpectralConfig) -> Result<Eigenpair> {
    cfg.validate()?;
    let defect = h.hermitian_defect();
    if defect > HERMITIAN_DEFECT {
        return Err(Error::invalid(format!(
            "matrix is not Hermitian (max |H - H*| = {defect:.3e})"
        )));
    }
    let top = top_eigenpair(
        h.dim(),
        |x, y| h.apply(x, y),
        StopRule::Residual(cfg.eig_tol),
        cfg.power_iter_max,
    );
    if !top.converged {
        return Err(Error::ConvergenceFailure {
            iterations: top.steps,
            last_estimate: top.value,
        });
    }
    Ok(Eigenpair {
        value: top.value,
        vector: top.vector,
    })
}

/// All eigenvalues. Triangular input is read off the diagonal (a Schur
/// sweep would smear the defective eigenvalue of `V_N` into a circle of
/// radius about `eps^(1/N)`); anything else goes through a complex Schur
/// decomposition.
pub fn eigenvalues(a: &ComplexMatrix) -> Result<Vec<Complex64>> {
    if a.is_lower_triangular() || a.transpose().is_lower_triangular() {
        return Ok(a.diagonal());
    }
    let n = a.dim();
    let schur = nalgebra::Schur::try_new(a.to_nalgebra(), f64::EPSILON, 1000 * n.max(10))
        .ok_or(Error::ConvergenceFailure {
            iterations: 1000 * n.max(10),
            last_estimate: f64::NAN,
        })?;
    let values = schur.eigenvalues().ok_or(Error::ConvergenceFailure {
        iterations: 0,
        last_estimate: f64::NAN,
    })?;
    Ok(values.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{build_volterra, random_invertible_matrix};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cfg() -> SpectralConfig {
        SpectralConfig::default()
    }

    /// Dense SVD, used only as an oracle.
    fn svd_max(a: &ComplexMatrix) -> f64 {
        a.to_nalgebra().singular_values().max()
    }

    #[test]
    fn norm_of_identity_and_nilpotent() {
        let i5 = ComplexMatrix::identity(5);
        assert!((spectral_norm(&i5, &cfg()).unwrap() - 1.0).abs() < 1e-14);
        let j = ComplexMatrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]).unwrap();
        assert!((spectral_norm(&j, &cfg()).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn norm_matches_dense_svd() {
        for seed in 0..5 {
            let a = random_invertible_matrix(6, seed, 1e6).unwrap();
            let got = spectral_norm(&a, &cfg()).unwrap();
            assert!((got - svd_max(&a)).abs() < 1e-9, "seed {seed}");
        }
    }

    #[test]
    fn rejects_bad_config() {
        let bad = SpectralConfig {
            power_iter_tol: 0.0,
            ..cfg()
        };
        assert!(spectral_norm(&ComplexMatrix::identity(2), &bad).is_err());
    }

    #[test]
    fn iteration_cap_reports_last_estimate() {
        let a = random_invertible_matrix(40, 3, 1e6).unwrap();
        let tight = SpectralConfig {
            power_iter_max: 2,
            ..cfg()
        };
        match spectral_norm(&a, &tight) {
            Err(Error::ConvergenceFailure {
                iterations,
                last_estimate,
            }) => {
                assert_eq!(iterations, 2);
                assert!(last_estimate > 0.0 && last_estimate <= svd_max(&a) + 1e-12);
            }
            other => panic!("expected convergence failure, got {other:?}"),
        }
    }

    #[test]
    fn diagonal_top_eigenpair() {
        let d = ComplexMatrix::from_diag(&[c(3.0, 0.0), c(1.0, 0.0), c(-2.0, 0.0)]).unwrap();
        let top = hermitian_max_eig(&d, &cfg()).unwrap();
        assert!((top.value - 3.0).abs() < 1e-14);
        assert!((top.vector[0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn volterra_hermitian_part_is_rank_one() {
        let n = 64;
        let v = build_volterra(n).unwrap();
        let top = hermitian_max_eig(&v.matrix().hermitize(), &cfg()).unwrap();
        assert!((top.value - 0.5).abs() < 1e-13);
    }

    #[test]
    fn rejects_non_hermitian() {
        let j = ComplexMatrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(
            hermitian_max_eig(&j, &cfg()),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn top_eigenpair_matches_dense_eigensolver() {
        for seed in 10..16 {
            let b = random_invertible_matrix(8, seed, 1e6).unwrap();
            let h = b.hermitize();
            let top = hermitian_max_eig(&h, &cfg()).unwrap();
            let oracle = nalgebra::SymmetricEigen::new(h.to_nalgebra())
                .eigenvalues
                .max();
            assert!((top.value - oracle).abs() < 1e-10, "seed {seed}");

            let mut hv = vec![c(0.0, 0.0); 8];
            h.apply(&top.vector, &mut hv);
            let resid: f64 = hv
                .iter()
                .zip(&top.vector)
                .map(|(a, b)| (a - b * top.value).norm_sqr())
                .sum::<f64>()
                .sqrt();
            let h_norm = spectral_norm(&h, &cfg()).unwrap();
            assert!(resid <= cfg().eig_tol * (1.0 + h_norm));
        }
    }

    #[test]
    fn eigenvalues_of_triangular_and_diagonal() {
        let v = build_volterra(50).unwrap();
        for z in eigenvalues(v.matrix()).unwrap() {
            assert!((z - c(0.01, 0.0)).norm() < 1e-12);
        }
        let d = ComplexMatrix::from_diag(&[c(0.0, 1.0), c(0.0, -1.0)]).unwrap();
        let mut ev = eigenvalues(&d).unwrap();
        ev.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((ev[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((ev[1] - c(0.0, 1.0)).norm() < 1e-14);
    }

    /// Characteristic polynomial by Faddeev-LeVerrier, highest degree first.
    fn char_poly(a: &ComplexMatrix) -> Vec<Complex64> {
        let n = a.dim();
        let mut coeffs = vec![c(1.0, 0.0)];
        let mut m = ComplexMatrix::zeros(n);
        let eye = ComplexMatrix::identity(n);
        for k in 1..=n {
            m = a.mul(&m).add(&eye.scale(*coeffs.last().unwrap()));
            let ck = -a.mul(&m).trace() / k as f64;
            coeffs.push(ck);
        }
        coeffs
    }

    #[test]
    fn eigenvalues_match_characteristic_polynomial() {
        let a = random_invertible_matrix(5, 99, 1e6).unwrap();
        let ev = eigenvalues(&a).unwrap();
        assert_eq!(ev.len(), 5);
        // expand prod (x - lambda_i)
        let mut expanded = vec![c(1.0, 0.0)];
        for &l in &ev {
            let mut next = vec![c(0.0, 0.0); expanded.len() + 1];
            for (i, &p) in expanded.iter().enumerate() {
                next[i] += p;
                next[i + 1] -= p * l;
            }
            expanded = next;
        }
        let oracle = char_poly(&a);
        for (p, q) in expanded.iter().zip(&oracle) {
            assert!((p - q).norm() <= 1e-8 * (1.0 + q.norm()), "{p} vs {q}");
        }
        let sum: Complex64 = ev.iter().sum();
        assert!((sum - a.trace()).norm() < 1e-10);

        let a_norm = spectral_norm(&a, &cfg()).unwrap();
        for &l in &ev {
            // backward error: smallest singular value of A - lambda I
            let shifted = a.affine(-l, c(1.0, 0.0));
            let inv_norm = nalgebra_min_sv(&shifted);
            assert!(inv_norm <= 1e-9 * a_norm);
        }
    }

    fn nalgebra_min_sv(a: &ComplexMatrix) -> f64 {
        a.to_nalgebra().singular_values().min()
    }
}
