//! Rayleigh quotients of explicit witness functions for the numerical ranges
//! of negative powers of the Volterra operator.
//!
//! For `g` in the range of `V^k` with `g^{(j)}(0) = 0` for `j < k`,
//! `V^{-k} g = g^{(k)}`, so `<V^{-k} g, g> / ||g||^2` is a ratio of two
//! integrals on `[0, 1]`. The witnesses are
//! `g_n = e^{±2 pi i n x} - 1` and `h_n = x^n` for `V^{-1}`, and
//! `g_r = x^n exp(r e^{i theta} x)` for `V^{-n}`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operators::{build_volterra, GridFunction};
use crate::quadrature::CompositeRule;

/// Largest `c / panels` (with `c = 2 r cos theta`) for which a 16-point
/// panel still resolves `e^{c (x - 1)}`.
const MAX_DECAY_PER_PANEL: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WitnessId {
    /// `e^{sign 2 pi i n x} - 1`
    G { n: u32, sign: i8 },
    /// `x^n`
    H { n: u32 },
    /// `x^n exp(r e^{i theta} x)`
    Gr { n: u32, theta: f64, r: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Quadrature,
}

/// `<V^{-k} g, g> / ||g||^2` for one witness `g`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WitnessQuotient {
    pub id: WitnessId,
    pub quotient: Complex64,
    pub method: Method,
    /// Total quadrature points, for [`Method::Quadrature`].
    pub quadrature_points: Option<usize>,
}

/// The rule used for the `g_n` and `h_n` quadratures: 16 points on 256
/// panels, 4096 points in all.
pub fn witness_rule() -> CompositeRule {
    CompositeRule::new(16, 256).expect("valid rule")
}

/// `(lhs, rhs)` of `Re<V^{-1} g, g> = (1/2)|int_0^1 f|^2` with `g = V f`,
/// on the grid: `lhs = h Re<V_N f, f>`, `rhs = (1/2)|h sum f|^2`. The `h`
/// weights make both sides approximate the integrals; they agree to
/// rounding because `V_N + V_N^*` is `h` times the all-ones matrix.
pub fn positivity_identity_check(f: &GridFunction) -> Result<(f64, f64)> {
    let v = build_volterra(f.grid_n())?;
    let h = v.step();
    let lhs = h * v.matrix().quadratic_form(f.values()).re;
    let sum: Complex64 = f.values().iter().sum();
    let rhs = 0.5 * (h * sum).norm_sqr();
    Ok((lhs, rhs))
}

pub fn witness_g_quotient(n: u32, sign: i8, method: Method) -> Result<WitnessQuotient> {
    if n == 0 {
        return Err(Error::invalid("witness index must be at least 1"));
    }
    if sign != 1 && sign != -1 {
        return Err(Error::invalid("sign must be +1 or -1"));
    }
    let s = f64::from(sign);
    let id = WitnessId::G { n, sign };
    Ok(match method {
        Method::ClosedForm => WitnessQuotient {
            id,
            quotient: Complex64::new(0.0, s * PI * f64::from(n)),
            method,
            quadrature_points: None,
        },
        Method::Quadrature => {
            let rule = witness_rule();
            let omega = s * 2.0 * PI * f64::from(n);
            let g = |x: f64| Complex64::from_polar(1.0, omega * x) - 1.0;
            let dg = |x: f64| Complex64::new(0.0, omega) * Complex64::from_polar(1.0, omega * x);
            let num = rule.integrate(|x| dg(x) * g(x).conj());
            let den = rule.integrate_real(|x| g(x).norm_sqr());
            WitnessQuotient {
                id,
                quotient: num / den,
                method,
                quadrature_points: Some(rule.points()),
            }
        }
    })
}

pub fn witness_h_quotient(n: u32, method: Method) -> Result<WitnessQuotient> {
    if n == 0 {
        return Err(Error::invalid("witness index must be at least 1"));
    }
    let id = WitnessId::H { n };
    Ok(match method {
        Method::ClosedForm => WitnessQuotient {
            id,
            quotient: Complex64::new(f64::from(n) + 0.5, 0.0),
            method,
            quadrature_points: None,
        },
        Method::Quadrature => {
            let rule = witness_rule();
            let k = n as i32;
            let num = rule.integrate_real(|x| f64::from(n) * x.powi(2 * k - 1));
            let den = rule.integrate_real(|x| x.powi(2 * k));
            WitnessQuotient {
                id,
                quotient: Complex64::new(num / den, 0.0),
                method,
                quadrature_points: Some(rule.points()),
            }
        }
    })
}

/// `int_0^1 x^m e^{c (x - 1)} dx` for `m = 0..=max_m`, i.e. the moments
/// with the common factor `e^c` removed.
fn scaled_moments(c: f64, max_m: usize, rule: &CompositeRule) -> Result<Vec<f64>> {
    if c / rule.panels() as f64 > MAX_DECAY_PER_PANEL {
        return Err(Error::Range(format!(
            "2 r cos(theta) = {c:.1} is too steep for {} panels; use at least {} panels",
            rule.panels(),
            (c / MAX_DECAY_PER_PANEL).ceil()
        )));
    }
    Ok((0..=max_m)
        .map(|m| rule.integrate_real(|x| x.powi(m as i32) * (c * (x - 1.0)).exp()))
        .collect())
}

/// Quotient for `g_r = x^n exp(r e^{i theta} x)` with the default rule
/// (16 points on 64 panels).
pub fn witness_gr_quotient(n: u32, theta: f64, r: f64) -> Result<WitnessQuotient> {
    witness_gr_quotient_with(n, theta, r, &CompositeRule::default())
}

/// `sum_k C(n,k) (n!/k!) a^k I_{n+k} / I_{2n}` with `a = r e^{i theta}` and
/// `I_m = int_0^1 x^m e^{2 r cos(theta) x} dx`, evaluated with `e^{2 r cos
/// theta}` cancelled.
pub fn witness_gr_quotient_with(n: u32, theta: f64, r: f64, rule: &CompositeRule) -> Result<WitnessQuotient> {
    if n < 2 {
        return Err(Error::invalid("g_r witnesses need n >= 2"));
    }
    if !(theta.abs() < PI / 2.0) {
        return Err(Error::invalid("theta must lie in (-pi/2, pi/2)"));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::invalid("r must be positive and finite"));
    }
    let n_us = n as usize;
    let c = 2.0 * r * theta.cos();
    let moments = scaled_moments(c, 2 * n_us, rule)?;
    let a = Complex64::from_polar(r, theta);
    // C(n,k) n!/k!, built up from k = 0
    let mut coeff = (1..=n_us).map(|j| j as f64).product::<f64>();
    let mut ak = Complex64::new(1.0, 0.0);
    let mut num = Complex64::new(0.0, 0.0);
    for k in 0..=n_us {
        if k > 0 {
            coeff *= (n_us + 1 - k) as f64 / (k * k) as f64;
            ak *= a;
        }
        num += ak * coeff * moments[n_us + k];
    }
    Ok(WitnessQuotient {
        id: WitnessId::Gr { n, theta, r },
        quotient: num / moments[2 * n_us],
        method: Method::Quadrature,
        quadrature_points: Some(rule.points()),
    })
}

/// `int x^m e^{c x} / int e^{c x}` over `[0, 1]`, `c = 2 r cos theta`, for
/// each `r`.
pub fn asymptotic_ratio_check(m: u32, theta: f64, r_list: &[f64]) -> Result<Vec<f64>> {
    if !(theta.abs() < PI / 2.0) {
        return Err(Error::invalid("theta must lie in (-pi/2, pi/2)"));
    }
    let rule = CompositeRule::default();
    r_list
        .iter()
        .map(|&r| {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::invalid("r must be positive and finite"));
            }
            if m == 0 {
                return Ok(1.0);
            }
            let mo = scaled_moments(2.0 * r * theta.cos(), m as usize, &rule)?;
            Ok(mo[m as usize] / mo[0])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tolerances::WITNESS_QUADRATURE_TOL;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn positivity_examples() {
        let ones = GridFunction::new(vec![c(1.0, 0.0); 4]).unwrap();
        let (lhs, rhs) = positivity_identity_check(&ones).unwrap();
        assert!((lhs - 0.5).abs() < 1e-15 && (rhs - 0.5).abs() < 1e-15);

        let wave = GridFunction::sample(512, |x| Complex64::from_polar(1.0, 2.0 * PI * x)).unwrap();
        let (lhs, rhs) = positivity_identity_check(&wave).unwrap();
        assert!(lhs.abs() < 1e-5 && rhs.abs() < 1e-5);
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn g_witness_values() {
        let q = witness_g_quotient(1, 1, Method::ClosedForm).unwrap();
        assert!((q.quotient - c(0.0, PI)).norm() < 1e-15);
        let q = witness_g_quotient(3, -1, Method::ClosedForm).unwrap();
        assert!((q.quotient - c(0.0, -3.0 * PI)).norm() < 1e-15);
        let q = witness_g_quotient(2, 1, Method::Quadrature).unwrap();
        assert_eq!(q.quadrature_points, Some(4096));
        assert!((q.quotient - c(0.0, 2.0 * PI)).norm() < 1e-6);
        assert!(witness_g_quotient(0, 1, Method::ClosedForm).is_err());
        assert!(witness_g_quotient(1, 0, Method::ClosedForm).is_err());
    }

    #[test]
    fn h_witness_values() {
        assert_eq!(witness_h_quotient(1, Method::ClosedForm).unwrap().quotient, c(1.5, 0.0));
        assert_eq!(witness_h_quotient(4, Method::ClosedForm).unwrap().quotient, c(4.5, 0.0));
        let q = witness_h_quotient(2, Method::Quadrature).unwrap();
        assert!((q.quotient - c(2.5, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn closed_form_and_quadrature_agree() {
        for n in 1..=10 {
            for sign in [1, -1] {
                let a = witness_g_quotient(n, sign, Method::ClosedForm).unwrap().quotient;
                let b = witness_g_quotient(n, sign, Method::Quadrature).unwrap().quotient;
                assert!((a - b).norm() < WITNESS_QUADRATURE_TOL, "g {n} {sign}");
                assert!(a.re >= -1e-9);
            }
            let a = witness_h_quotient(n, Method::ClosedForm).unwrap().quotient;
            let b = witness_h_quotient(n, Method::Quadrature).unwrap().quotient;
            assert!((a - b).norm() < WITNESS_QUADRATURE_TOL, "h {n}");
        }
    }

    /// `g^{(n)} = p_n(x) e^{a x}` with `p_0 = x^n`, `p_{j+1} = p_j' + a p_j`;
    /// the quotient is `int p_n x^n e^{c x} / int x^{2n} e^{c x}`, here on a
    /// different rule.
    fn polynomial_oracle(n: usize, theta: f64, r: f64) -> Complex64 {
        let a = Complex64::from_polar(r, theta);
        let mut p = vec![c(0.0, 0.0); n + 1];
        p[n] = c(1.0, 0.0);
        for _ in 0..n {
            let mut next: Vec<Complex64> = p.iter().map(|&q| q * a).collect();
            for (k, &q) in p.iter().enumerate().skip(1) {
                next[k - 1] += q * k as f64;
            }
            p = next;
        }
        let rule = CompositeRule::new(20, 200).unwrap();
        let cc = 2.0 * r * theta.cos();
        let weight = |x: f64| (cc * (x - 1.0)).exp();
        let num = rule.integrate(|x| {
            let poly: Complex64 = p.iter().enumerate().map(|(k, &q)| q * x.powi(k as i32)).sum();
            poly * x.powi(n as i32) * weight(x)
        });
        let den = rule.integrate_real(|x| x.powi(2 * n as i32) * weight(x));
        num / den
    }

    #[test]
    fn gr_matches_polynomial_oracle() {
        for (n, theta, r) in [(2, 0.0, 40.0), (2, PI / 4.0, 40.0), (3, -PI / 3.0, 30.0), (4, 1.2, 15.0)] {
            let got = witness_gr_quotient(n, theta, r).unwrap().quotient;
            let want = polynomial_oracle(n as usize, theta, r);
            assert!((got - want).norm() <= 1e-10 * want.norm(), "({n}, {theta}, {r})");
        }
    }

    #[test]
    fn gr_frozen_values() {
        // 30-digit reference evaluations of the same integrals
        let frozen = [
            ((2, 0.0, 40.0), c(1763.9987827707478, 0.0)),
            ((2, PI / 4.0, 40.0), c(117.1346793857028, 1715.0653037553939)),
            ((3, -PI / 3.0, 30.0), c(-30875.262453984953, -7715.024023366184)),
        ];
        for ((n, theta, r), want) in frozen {
            let got = witness_gr_quotient(n, theta, r).unwrap().quotient;
            assert!((got - want).norm() <= 1e-10 * want.norm(), "({n}, {theta}, {r}): {got}");
        }
    }

    #[test]
    fn gr_examples() {
        let q = witness_gr_quotient(2, 0.0, 40.0).unwrap().quotient;
        assert!((q.norm() / 1600.0 - 1.0).abs() < 0.15);
        let q = witness_gr_quotient(2, PI / 4.0, 40.0).unwrap().quotient;
        assert!((q.arg() - PI / 2.0).abs() < 0.1);
        // W(V^-3) reaches the left half-plane
        let q = witness_gr_quotient(3, -PI / 3.0, 30.0).unwrap().quotient;
        assert!(q.re < 0.0 && q.arg().abs() > PI / 2.0);
    }

    #[test]
    fn gr_argument_checks() {
        assert!(witness_gr_quotient(1, 0.0, 1.0).is_err());
        assert!(witness_gr_quotient(2, PI / 2.0, 1.0).is_err());
        assert!(witness_gr_quotient(2, 0.0, 0.0).is_err());
        assert!(matches!(witness_gr_quotient(2, 0.0, 400.0), Err(Error::Range(_))));
        let fine = CompositeRule::new(16, 128).unwrap();
        assert!(witness_gr_quotient_with(2, 0.0, 400.0, &fine).is_ok());
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(asymptotic_ratio_check(0, 0.3, &[1.0, 7.0]).unwrap(), vec![1.0, 1.0]);
        // closed forms by integration by parts
        let closed = |c: f64| {
            let e = c.exp();
            let i0 = (e - 1.0) / c;
            let i1 = ((c - 1.0) * e + 1.0) / (c * c);
            let i2 = (e - 2.0 * i1) / c;
            (i1 / i0, i2 / i0)
        };
        let ratios = asymptotic_ratio_check(2, 0.0, &[5.0, 20.0, 80.0]).unwrap();
        assert!(ratios.windows(2).all(|w| w[0] < w[1]) && ratios[2] < 1.0);
        for (&r, &got) in [5.0, 20.0, 80.0].iter().zip(&ratios) {
            assert!((got - closed(2.0 * r).1).abs() < 1e-12);
        }
        let r1 = asymptotic_ratio_check(1, 0.0, &[100.0]).unwrap()[0];
        assert!(r1 > 0.98 && (r1 - closed(200.0).0).abs() < 1e-12);
        assert!(asymptotic_ratio_check(1, PI / 2.0, &[1.0]).is_err());
    }

    /// Convex hull by monotone chain, counter-clockwise.
    fn hull(mut pts: Vec<Complex64>) -> Vec<Complex64> {
        pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let cross = |o: Complex64, a: Complex64, b: Complex64| (a - o).re * (b - o).im - (a - o).im * (b - o).re;
        let mut lower: Vec<Complex64> = Vec::new();
        for &p in &pts {
            while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
                lower.pop();
            }
            lower.push(p);
        }
        let mut upper: Vec<Complex64> = Vec::new();
        for &p in pts.iter().rev() {
            while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
                upper.pop();
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        lower
    }

    fn inside(poly: &[Complex64], p: Complex64) -> bool {
        let n = poly.len();
        (0..n).all(|k| {
            let (a, b) = (poly[k], poly[(k + 1) % n]);
            (b - a).re * (p - a).im - (b - a).im * (p - a).re >= 0.0
        })
    }

    #[test]
    fn witness_hull_covers_a_right_halfplane_box() {
        let mut pts = Vec::new();
        for n in 1..=40 {
            for sign in [1, -1] {
                pts.push(witness_g_quotient(n, sign, Method::ClosedForm).unwrap().quotient);
            }
            pts.push(witness_h_quotient(n, Method::ClosedForm).unwrap().quotient);
        }
        let poly = hull(pts);
        for i in 0..=20 {
            for j in 0..=20 {
                let p = c(0.1 + 9.9 * i as f64 / 20.0, -10.0 + j as f64);
                assert!(inside(&poly, p), "{p}");
            }
        }
        // only the first few witnesses: the box is not yet covered
        let small = hull(vec![c(0.0, PI), c(0.0, -PI), c(1.5, 0.0)]);
        assert!(!inside(&small, c(10.0, 10.0)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn positivity_identity_is_exact(
            f in (1usize..200).prop_flat_map(|n| prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), n))
        ) {
            let g = GridFunction::new(f.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap();
            let (lhs, rhs) = positivity_identity_check(&g).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
            prop_assert!(lhs >= -1e-12);
        }

        #[test]
        fn gr_grows_and_turns_toward_n_theta(n in 2u32..4, theta in -1.2..1.2f64) {
            let ladder = [20.0, 40.0, 80.0, 160.0];
            let qs: Vec<Complex64> = ladder
                .iter()
                .map(|&r| witness_gr_quotient(n, theta, r).unwrap().quotient)
                .collect();
            prop_assert!(qs.windows(2).all(|w| w[0].norm() < w[1].norm()));
            let target = Complex64::from_polar(1.0, f64::from(n) * theta);
            let err: Vec<f64> = qs.iter().map(|q| (q / target).arg().abs()).collect();
            prop_assert!(err[3] <= err[0] + 1e-12);
        }
    }
}
