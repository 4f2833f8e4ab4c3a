//! Nyström matrices of `F_λ` and `D_λ` on `(0, λ)` and the cosine transform
//! `F_+φ(x) = 2∫_0^∞ cos(2πxy) φ(y) dy`.
//!
//! Even functions are represented on the half-line with norm
//! `∫_0^∞ |f|² dt`. Matrices use the symmetrised normalisation: if `u` holds
//! samples at the nodes then `√w ∘ u` holds the coordinates in which the
//! discretised operators are symmetric.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // inherent f64 math is only visible when std is linked
use num_traits::Float;

use crate::c64;
use crate::error::{Error, Result};
use crate::numerics::{adaptive, Estimate, QuadratureRule};

/// Samples at the nodes of a rule on `(0, λ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct InnerFunction {
    rule: Arc<QuadratureRule>,
    values: Vec<c64>,
}

impl InnerFunction {
    pub fn new(rule: Arc<QuadratureRule>, values: Vec<c64>) -> Result<Self> {
        if values.len() != rule.len() {
            return Err(Error::InvalidArgument("one sample per quadrature node"));
        }
        if values.iter().any(|v| !crate::numerics::is_finite(*v)) {
            return Err(Error::InvalidArgument("samples must be finite"));
        }
        Ok(Self { rule, values })
    }

    /// Samples `f` at the nodes.
    pub fn from_fn(rule: Arc<QuadratureRule>, mut f: impl FnMut(f64) -> c64) -> Result<Self> {
        let values = rule.nodes().iter().map(|&x| f(x)).collect();
        Self::new(rule, values)
    }

    pub fn zero(rule: Arc<QuadratureRule>) -> Self {
        let values = alloc::vec![c64::new(0.0, 0.0); rule.len()];
        Self { rule, values }
    }

    pub fn rule(&self) -> &Arc<QuadratureRule> {
        &self.rule
    }

    pub fn values(&self) -> &[c64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<c64> {
        self.values
    }

    pub fn lambda(&self) -> f64 {
        self.rule.interval().1
    }

    /// `∫_0^λ f ḡ`.
    pub fn inner(&self, other: &InnerFunction) -> c64 {
        self.values
            .iter()
            .zip(&other.values)
            .zip(self.rule.weights())
            .map(|((a, b), w)| a * b.conj() * *w)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }

    /// Largest sample modulus.
    pub fn sup(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Pointwise linear combination `a·self + b·other`.
    pub fn combine(&self, a: c64, other: &InnerFunction, b: c64) -> InnerFunction {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        InnerFunction {
            rule: self.rule.clone(),
            values,
        }
    }

    pub fn scale(&self, a: c64) -> InnerFunction {
        InnerFunction {
            rule: self.rule.clone(),
            values: self.values.iter().map(|v| a * v).collect(),
        }
    }

    /// Coordinates `√w_i u_i`.
    pub(crate) fn to_symmetric(&self) -> Vec<c64> {
        self.values
            .iter()
            .zip(self.rule.weights())
            .map(|(v, w)| v * w.sqrt())
            .collect()
    }

    pub(crate) fn from_symmetric(rule: Arc<QuadratureRule>, coords: Vec<c64>) -> Self {
        let values = coords
            .into_iter()
            .zip(rule.weights())
            .map(|(c, w)| c / w.sqrt())
            .collect();
        Self { rule, values }
    }

    /// Polynomial interpolant of the samples at `x ∈ [0, λ]`.
    pub fn interpolate(&self, x: f64) -> c64 {
        self.rule.interpolate(&self.values, x)
    }
}

/// Which operator a [`KernelMatrix`] discretises.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelKind {
    FLambda,
    DLambda,
}

/// Dense real symmetric Nyström matrix in `√w` normalisation.
#[derive(Clone, Debug)]
pub struct KernelMatrix {
    kind: KernelKind,
    rule: Arc<QuadratureRule>,
    entries: Vec<f64>,
}

impl KernelMatrix {
    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn rule(&self) -> &Arc<QuadratureRule> {
        &self.rule
    }

    pub fn dim(&self) -> usize {
        self.rule.len()
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim() + j]
    }

    /// `max |M_ij − M_ji|`.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// The discretised operator applied to samples.
    pub fn apply(&self, u: &InnerFunction) -> InnerFunction {
        debug_assert!(Arc::ptr_eq(&self.rule, u.rule()) || *self.rule == **u.rule());
        let y = crate::linalg::mat_vec(&self.entries, self.dim(), &u.to_symmetric());
        InnerFunction::from_symmetric(self.rule.clone(), y)
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }
}

fn inner_lambda(rule: &QuadratureRule) -> Result<f64> {
    let (a, b) = rule.interval();
    if a != 0.0 || !(b > 0.0) || !b.is_finite() {
        return Err(Error::InvalidArgument(
            "kernel rules must live on (0, λ) with λ > 0",
        ));
    }
    Ok(b)
}

/// `M_ij = 2 cos(2π x_i x_j) √(w_i w_j)`.
pub fn build_f_lambda(rule: &Arc<QuadratureRule>) -> Result<KernelMatrix> {
    inner_lambda(rule)?;
    let n = rule.len();
    let x = rule.nodes();
    let s: Vec<f64> = rule.weights().iter().map(|w| w.sqrt()).collect();
    let mut entries = alloc::vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let v = 2.0 * (2.0 * PI * x[i] * x[j]).cos() * s[i] * s[j];
            entries[i * n + j] = v;
            entries[j * n + i] = v;
        }
    }
    Ok(KernelMatrix {
        kind: KernelKind::FLambda,
        rule: rule.clone(),
        entries,
    })
}

/// `S(u) = sin(2πλu)/(πu)`, with `S(0) = 2λ`.
fn dirichlet(lambda: f64, u: f64) -> f64 {
    let z = 2.0 * PI * lambda * u;
    if z.abs() < 1e-4 {
        // sin z / z to O(z⁶)
        let z2 = z * z;
        2.0 * lambda * (1.0 - z2 / 6.0 * (1.0 - z2 / 20.0))
    } else {
        z.sin() / (PI * u)
    }
}

/// Folded Dirichlet kernel `√(w_i w_j) [S(x_i − x_j) + S(x_i + x_j)]`.
pub fn build_d_lambda(rule: &Arc<QuadratureRule>) -> Result<KernelMatrix> {
    let lambda = inner_lambda(rule)?;
    let n = rule.len();
    let x = rule.nodes();
    let s: Vec<f64> = rule.weights().iter().map(|w| w.sqrt()).collect();
    let mut entries = alloc::vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let k = dirichlet(lambda, x[i] - x[j]) + dirichlet(lambda, x[i] + x[j]);
            let v = k * s[i] * s[j];
            entries[i * n + j] = v;
            entries[j * n + i] = v;
        }
    }
    Ok(KernelMatrix {
        kind: KernelKind::DLambda,
        rule: rule.clone(),
        entries,
    })
}

/// `F_+(u·1_{(0,λ)})(x) = 2 Σ_j w_j cos(2π x y_j) u(y_j)`, an entire function
/// of `x`.
pub fn cosine_transform_of_inner(u: &InnerFunction, x: f64) -> c64 {
    let rule = u.rule();
    rule.nodes()
        .iter()
        .zip(rule.weights())
        .zip(u.values())
        .map(|((&y, &w), v)| v * (2.0 * w * (2.0 * PI * x * y).cos()))
        .sum()
}

/// An even function on `t ≥ 0` that can be evaluated pointwise and comes with
/// a certified envelope beyond some point.
pub trait DecayingFunction {
    fn value(&self, t: f64) -> c64;

    /// An upper bound for `∫_T^∞ |f(t)| dt`; `None` when no certificate is
    /// available at `T`.
    fn tail_mass(&self, t: f64) -> Option<f64>;

    /// Points where `f` or a low derivative is discontinuous; quadrature
    /// panels are split there.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Smallest `T = 2^k` (`k ≥ 0`) whose certified tail mass is below `target`.
pub fn default_t_out<F: DecayingFunction + ?Sized>(f: &F, target: f64) -> Result<f64> {
    let mut t = 1.0;
    for _ in 0..40 {
        match f.tail_mass(t) {
            Some(m) if m.is_finite() && m >= 0.0 && 2.0 * m <= target => return Ok(t),
            _ => t *= 2.0,
        }
    }
    Err(Error::Contract("decay bound never falls below the target"))
}

/// `2∫_0^∞ cos(2πxt) f(t) dt`, truncated at `t_out`. The error estimate
/// includes `2∫_{t_out}^∞ |f|` from the decay certificate.
pub fn cosine_transform_numeric<F: DecayingFunction + ?Sized>(
    f: &F,
    x: f64,
    t_out: f64,
) -> Result<Estimate> {
    transform_on(f, x, 0.0, t_out)
}

/// `2∫_a^{t_out} cos(2πxt) f(t) dt` plus the certified remainder, for `f`
/// supported on `[a, ∞)`.
pub(crate) fn transform_on<F: DecayingFunction + ?Sized>(
    f: &F,
    x: f64,
    a: f64,
    t_out: f64,
) -> Result<Estimate> {
    if !(t_out > a) || !t_out.is_finite() || !x.is_finite() {
        return Err(Error::InvalidArgument(
            "need a finite truncation point past the support start",
        ));
    }
    let tail = match f.tail_mass(t_out) {
        Some(m) if m.is_finite() && m >= 0.0 => 2.0 * m,
        _ => {
            return Err(Error::Contract(
                "no valid decay bound at the truncation point",
            ))
        }
    };
    let mut cuts: Vec<f64> = f
        .breakpoints()
        .into_iter()
        .filter(|&b| b > a && b < t_out)
        .collect();
    cuts.push(t_out);
    cuts.sort_by(|p, q| p.partial_cmp(q).unwrap_or(core::cmp::Ordering::Equal));
    // keep each panel within about one period of the cosine
    let panel = (0.5f64).min(1.0 / (2.0 * x.abs() + 1.0));
    let mut integrand = |t: f64| f.value(t) * (2.0 * (2.0 * PI * x * t).cos());
    let mut total = Estimate::ZERO;
    let mut lo = a;
    for hi in cuts {
        let pieces = ((hi - lo) / panel).ceil().max(1.0) as usize;
        let h = (hi - lo) / pieces as f64;
        for k in 0..pieces {
            let p = lo + h * k as f64;
            let q = if k + 1 == pieces { hi } else { p + h };
            total += adaptive(&mut integrand, p, q, 1e-17, 1e-15);
        }
        lo = hi;
    }
    total.err += tail + 4.0 * f64::EPSILON * total.value.norm();
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::gauss_legendre;

    fn rule(n: usize, lambda: f64) -> Arc<QuadratureRule> {
        Arc::new(gauss_legendre(n, 0.0, lambda).unwrap())
    }

    #[test]
    fn matrices_are_symmetric() {
        let r = rule(50, 1.3);
        assert_eq!(build_f_lambda(&r).unwrap().symmetry_defect(), 0.0);
        assert_eq!(build_d_lambda(&r).unwrap().symmetry_defect(), 0.0);
    }

    #[test]
    fn d_diagonal_uses_removable_limit() {
        let lambda = 0.8;
        let r = rule(20, lambda);
        let d = build_d_lambda(&r).unwrap();
        for i in [0, 7, 19] {
            let (x, w) = (r.nodes()[i], r.weights()[i]);
            let expect = w * (2.0 * lambda + (4.0 * PI * lambda * x).sin() / (2.0 * PI * x));
            assert!((d.get(i, i) - expect).abs() < 1e-15 * expect.abs().max(1.0));
        }
    }

    #[test]
    fn rejects_rules_off_the_origin() {
        let r = Arc::new(gauss_legendre(5, 0.1, 1.0).unwrap());
        assert!(build_f_lambda(&r).is_err());
    }

    #[test]
    fn inner_transform_at_zero_is_twice_lambda() {
        let r = rule(40, 1.0);
        let one = InnerFunction::from_fn(r.clone(), |_| c64::new(1.0, 0.0)).unwrap();
        assert!((cosine_transform_of_inner(&one, 0.0) - c64::new(2.0, 0.0)).norm() < 1e-14);
        let zero = InnerFunction::zero(r);
        assert_eq!(cosine_transform_of_inner(&zero, 3.7), c64::new(0.0, 0.0));
    }

    struct Gaussian;
    impl DecayingFunction for Gaussian {
        fn value(&self, t: f64) -> c64 {
            c64::new(2f64.powf(0.25) * (-PI * t * t).exp(), 0.0)
        }
        fn tail_mass(&self, t: f64) -> Option<f64> {
            // ∫_T^∞ e^{-πt²} ≤ e^{-πT²}/(2πT)
            Some(2f64.powf(0.25) * (-PI * t * t).exp() / (2.0 * PI * t))
        }
    }

    #[test]
    fn gaussian_is_self_reciprocal() {
        for &x in &[0.0, 0.5, 1.3] {
            let t = cosine_transform_numeric(&Gaussian, x, 8.0).unwrap();
            assert!((t.value - Gaussian.value(x)).norm() < 1e-13);
            assert!(t.err < 1e-10);
        }
    }

    struct NoBound;
    impl DecayingFunction for NoBound {
        fn value(&self, _: f64) -> c64 {
            c64::new(1.0, 0.0)
        }
        fn tail_mass(&self, _: f64) -> Option<f64> {
            None
        }
    }

    #[test]
    fn missing_bound_is_a_contract_error() {
        assert!(matches!(
            cosine_transform_numeric(&NoBound, 0.3, 5.0),
            Err(Error::Contract(_))
        ));
        assert!(default_t_out(&NoBound, 1e-12).is_err());
        assert_eq!(default_t_out(&Gaussian, 1e-12).unwrap(), 4.0);
    }
}
