//! Composite Gauss–Legendre quadrature on `[0, 1]`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `order`-point Gauss–Legendre rule repeated on `panels` equal panels.
#[derive(Clone, Debug, PartialEq)]
pub struct CompositeRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    panels: usize,
}

impl Default for CompositeRule {
    /// 16 points on each of 64 panels.
    fn default() -> Self {
        Self::new(16, 64).expect("valid default rule")
    }
}

impl CompositeRule {
    pub fn new(order: usize, panels: usize) -> Result<Self> {
        if order == 0 || panels == 0 {
            return Err(Error::invalid("quadrature order and panel count must be positive"));
        }
        let (nodes, weights) = gauss_legendre(order);
        Ok(Self { nodes, weights, panels })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn points(&self) -> usize {
        self.order() * self.panels
    }

    /// `int_0^1 f(x) dx`
    pub fn integrate(&self, f: impl Fn(f64) -> Complex64) -> Complex64 {
        let width = 1.0 / self.panels as f64;
        let mut total = Complex64::new(0.0, 0.0);
        for p in 0..self.panels {
            let mid = (p as f64 + 0.5) * width;
            let mut panel = Complex64::new(0.0, 0.0);
            for (&x, &w) in self.nodes.iter().zip(&self.weights) {
                panel += f(mid + 0.5 * width * x) * w;
            }
            total += panel * (0.5 * width);
        }
        total
    }

    pub fn integrate_real(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.integrate(|x| Complex64::new(f(x), 0.0)).re
    }
}

/// Nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_rules_match_tables() {
        let (x, w) = gauss_legendre(2);
        assert!((x[1] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-15);
        let (x, w) = gauss_legendre(3);
        assert!(x[1].abs() < 1e-15 && (w[1] - 8.0 / 9.0).abs() < 1e-15);
        assert!((x[2] - 0.6f64.sqrt()).abs() < 1e-15 && (w[2] - 5.0 / 9.0).abs() < 1e-15);
        let (x, w) = gauss_legendre(1);
        assert_eq!((x[0], w[0]), (0.0, 2.0));
    }

    #[test]
    fn weights_sum_to_two_and_nodes_are_sorted() {
        for n in [4, 7, 16, 33] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let rule = CompositeRule::new(8, 1).unwrap();
        for m in 0..16 {
            let got = rule.integrate_real(|x| x.powi(m));
            assert!((got - 1.0 / (m + 1) as f64).abs() < 1e-14, "degree {m}");
        }
    }

    #[test]
    fn oscillatory_and_exponential_integrands() {
        let rule = CompositeRule::default();
        let tau = std::f64::consts::TAU;
        let z = rule.integrate(|x| Complex64::from_polar(1.0, 5.0 * tau * x));
        assert!(z.norm() < 1e-14);
        let c = 80.0;
        let got = rule.integrate_real(|x| (c * (x - 1.0)).exp());
        let want = (1.0 - (-c as f64).exp()) / c;
        assert!((got - want).abs() < 1e-15);
    }

    #[test]
    fn rejects_empty_rules() {
        assert!(CompositeRule::new(0, 4).is_err());
        assert!(CompositeRule::new(4, 0).is_err());
        assert_eq!(CompositeRule::new(16, 256).unwrap().points(), 4096);
    }
}
