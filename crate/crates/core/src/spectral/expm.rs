//! Matrix exponential by scaling and squaring with a degree-13 Padé
//! approximant (Higham's 2005 variant, without the lower-degree shortcuts).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Factorization};
use crate::tolerances::EXPM_MAX_NORM;

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Largest 1-norm for which the unscaled degree-13 approximant is accurate
/// to unit roundoff.
const THETA13: f64 = 5.371920351148152;

fn combo(terms: &[(f64, &ComplexMatrix)], identity: f64) -> ComplexMatrix {
    let n = terms[0].1.dim();
    let mut out = ComplexMatrix::identity(n).scale(Complex64::new(identity, 0.0));
    for &(c, m) in terms {
        out = out.add(&m.scale(Complex64::new(c, 0.0)));
    }
    out
}

/// `exp(t A)`. Fails with a range error when `||t A||_1` exceeds 50.
pub fn matrix_exponential(a: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if !t.is_finite() {
        return Err(Error::invalid("t must be finite"));
    }
    let ta = a.scale(Complex64::new(t, 0.0));
    let norm = ta.norm_one();
    if norm > EXPM_MAX_NORM {
        return Err(Error::Range(format!(
            "||tA||_1 = {norm:.3e} exceeds the supported bound {EXPM_MAX_NORM}"
        )));
    }
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let scaled = ta.scale(Complex64::new(0.5f64.powi(s), 0.0));

    let b = &PADE13;
    let a2 = scaled.mul(&scaled);
    let a4 = a2.mul(&a2);
    let a6 = a4.mul(&a2);
    let inner_u = a6.mul(&combo(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)], 0.0));
    let u = scaled.mul(&combo(
        &[(1.0, &inner_u), (b[7], &a6), (b[5], &a4), (b[3], &a2)],
        b[1],
    ));
    let inner_v = a6.mul(&combo(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)], 0.0));
    let v = combo(&[(1.0, &inner_v), (b[6], &a6), (b[4], &a4), (b[2], &a2)], b[0]);

    let p = v.add(&u);
    let q = v.sub(&u);
    let f = Factorization::new(&q).ok_or(Error::SingularPencil { rcond: 0.0 })?;
    // solve q X = p column by column through the transpose
    let mut x_t = p.transpose();
    for j in 0..x_t.dim() {
        f.solve(x_t.row_mut(j));
    }
    let mut r = x_t.transpose();
    for _ in 0..s {
        r = r.mul(&r);
    }
    Ok(r)
}
