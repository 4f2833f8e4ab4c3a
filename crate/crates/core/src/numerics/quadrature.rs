use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // inherent f64 math is only visible when std is linked
use num_traits::Float;

use crate::error::{Error, Result};

/// Nodes and positive weights on an open interval `(a, b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    a: f64,
    b: f64,
    /// Barycentric interpolation weights attached to the nodes (scale free).
    bary: Vec<f64>,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∑ w_i f(x_i)`.
    pub fn integrate<T, F>(&self, mut f: F) -> T
    where
        T: core::ops::Add<Output = T> + core::ops::Mul<f64, Output = T> + Default,
        F: FnMut(f64) -> T,
    {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::default(), |acc, (&x, &w)| acc + f(x) * w)
    }

    /// Barycentric weights for Lagrange interpolation through the nodes.
    pub fn barycentric_weights(&self) -> &[f64] {
        &self.bary
    }

    /// Values at `x` of the Lagrange basis polynomials through the nodes,
    /// by the second barycentric formula. Meant for `x` inside the interval.
    pub fn interpolation_row(&self, x: f64) -> Vec<f64> {
        let mut row = alloc::vec![0.0; self.len()];
        if let Some(j) = self.nodes.iter().position(|&xj| xj == x) {
            row[j] = 1.0;
            return row;
        }
        let mut denom = 0.0;
        for ((r, &xj), &bj) in row.iter_mut().zip(&self.nodes).zip(&self.bary) {
            *r = bj / (x - xj);
            denom += *r;
        }
        for r in row.iter_mut() {
            *r /= denom;
        }
        row
    }

    /// Polynomial interpolant of `values` (given at the nodes) evaluated at `x`.
    pub fn interpolate<T>(&self, values: &[T], x: f64) -> T
    where
        T: Copy + Default + core::ops::Add<Output = T> + core::ops::Mul<f64, Output = T>,
    {
        assert_eq!(values.len(), self.len(), "one value per node");
        self.interpolation_row(x)
            .iter()
            .zip(values)
            .fold(T::default(), |acc, (&l, &v)| acc + v * l)
    }
}

/// Gauss–Legendre rule with `n` nodes mapped affinely onto `(a, b)`.
///
/// Roots are found by Newton iteration in the angle `θ` (`x = cos θ`), which
/// keeps `1 - x²` and nodes next to the end points accurate to full relative
/// precision.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::InvalidArgument("quadrature order must be positive"));
    }
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidArgument(
            "quadrature interval must satisfy a < b",
        ));
    }
    let len = b - a;
    let mut nodes = alloc::vec![0.0; n];
    let mut weights = alloc::vec![0.0; n];
    let mut bary = alloc::vec![0.0; n];
    let nf = n as f64;
    for i in 0..n {
        // i-th root counted from x = 1 downwards
        let mut theta = PI * (i as f64 + 0.75) / (nf + 0.5);
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative_theta(n, theta);
            dp = d;
            let step = p / d;
            theta -= step;
            if step.abs() <= 1e-15 * theta.max(1e-300) {
                let (_, d) = legendre_with_derivative_theta(n, theta);
                dp = d;
                break;
            }
        }
        // dP/dθ = -sin θ P'(x); weight = 2 / (sin²θ P'(x)²) = 2 / (dP/dθ)²
        let w_ref = 2.0 / (dp * dp);
        let half = 0.5 * theta;
        // (1 + cos θ) / 2 without cancellation
        let s = half.cos() * half.cos();
        let j = n - 1 - i;
        nodes[j] = a + len * s;
        weights[j] = 0.5 * len * w_ref;
        let sin_t = theta.sin();
        let sign = if j.is_multiple_of(2) { 1.0 } else { -1.0 };
        bary[j] = sign * (sin_t * sin_t * w_ref).sqrt();
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        a,
        b,
        bary,
    })
}

/// `P_n(cos θ)` and `d/dθ P_n(cos θ)`.
fn legendre_with_derivative_theta(n: usize, theta: f64) -> (f64, f64) {
    let x = theta.cos();
    let sin_t = theta.sin();
    let mut p_prev = 1.0;
    let mut p = x;
    if n == 1 {
        return (x, -sin_t);
    }
    for k in 2..=n {
        let kf = k as f64;
        let next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = next;
    }
    // (1 - x²) P'_n = n (P_{n-1} - x P_n), and dP/dθ = -sin θ P'_n
    let nf = n as f64;
    let deriv = -nf * (p_prev - x * p) / sin_t;
    (p, deriv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation_reproduces_smooth_functions() {
        let rule = gauss_legendre(60, 0.0, 1.5).unwrap();
        let values: Vec<f64> = rule.nodes().iter().map(|&x| (3.0 * x).cos()).collect();
        for &x in &[0.0, 1e-4, 0.37, 1.2, 1.5] {
            assert!((rule.interpolate(&values, x) - (3.0 * x).cos()).abs() < 1e-13);
        }
        let j = 17;
        assert_eq!(rule.interpolate(&values, rule.nodes()[j]), values[j]);
    }

    #[test]
    fn single_node_is_midpoint() {
        let r = gauss_legendre(1, 0.0, 1.0).unwrap();
        assert!((r.nodes()[0] - 0.5).abs() < 1e-15);
        assert!((r.weights()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_nodes_integrate_cubics() {
        let r = gauss_legendre(2, 0.0, 1.0).unwrap();
        let s: f64 = r.integrate(|x| x * x);
        assert!((s - 1.0 / 3.0).abs() < 1e-15);
        let c: f64 = r.integrate(|x| x * x * x);
        assert!((c - 0.25).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(
            gauss_legendre(0, 0.0, 1.0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            gauss_legendre(4, 1.0, 1.0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            gauss_legendre(4, 2.0, 1.0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn invariants_for_large_orders() {
        for &n in &[3usize, 16, 200, 401, 800] {
            let r = gauss_legendre(n, -0.5, 2.0).unwrap();
            assert!(r.nodes().windows(2).all(|p| p[0] < p[1]));
            assert!(r.nodes()[0] > -0.5 && r.nodes()[n - 1] < 2.0);
            assert!(r.weights().iter().all(|&w| w > 0.0));
            let total: f64 = r.weights().iter().sum();
            assert!((total - 2.5).abs() <= 1e-13 * 2.5, "n={n} total={total}");
            // degree 2n-1 exactness on a monomial
            let deg = (2 * n - 1).min(60) as i32;
            let exact = (2.0f64.powi(deg + 1) - (-0.5f64).powi(deg + 1)) / (deg as f64 + 1.0);
            let got: f64 = r.integrate(|x| x.powi(deg));
            assert!((got - exact).abs() <= 1e-12 * exact.abs(), "n={n}");
        }
    }
}
