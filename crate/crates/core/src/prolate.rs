//! The even prolate basis of `F_λ`, resolvent solves and Fredholm
//! determinants.

use alloc::sync::Arc;
use alloc::vec::Vec;
#[allow(unused_imports)] // inherent f64 math is only visible when std is linked
use num_traits::Float;

use crate::c64;
use crate::error::{Error, Result};
use crate::kernels::{cosine_transform_of_inner, InnerFunction, KernelKind, KernelMatrix};
use crate::linalg::{symmetric_eigen, Cholesky};
use crate::numerics::QuadratureRule;

/// Modes with `|μ| ≤` this are Nyström noise.
pub const RESOLVED_CUTOFF: f64 = 1e-13;
/// Factors closer to 1 than this are dropped from determinants.
pub const DET_CUTOFF: f64 = 1e-16;

/// Eigenpairs `(μ_n, e_{2n})` of the discretised `F_λ`, sorted by `|μ_n|`
/// decreasing.
#[derive(Clone, Debug)]
pub struct ProlateBasis {
    rule: Arc<QuadratureRule>,
    mus: Vec<f64>,
    efuns: Vec<InnerFunction>,
}

impl ProlateBasis {
    pub fn rule(&self) -> &Arc<QuadratureRule> {
        &self.rule
    }

    pub fn mus(&self) -> &[f64] {
        &self.mus
    }

    pub fn efuns(&self) -> &[InnerFunction] {
        &self.efuns
    }

    pub fn len(&self) -> usize {
        self.mus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mus.is_empty()
    }

    /// Number of leading modes with `|μ| > RESOLVED_CUTOFF`.
    pub fn resolved(&self) -> usize {
        self.mus
            .iter()
            .take_while(|m| m.abs() > RESOLVED_CUTOFF)
            .count()
    }

    /// `max_n |⟨e_m, e_n⟩ − δ_mn|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (m, em) in self.efuns.iter().enumerate() {
            for en in &self.efuns[..=m] {
                let target = if core::ptr::eq(em, en) { 1.0 } else { 0.0 };
                worst = worst.max((em.inner(en) - c64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    /// `max ‖F e_n − μ_n e_n‖` over the resolved modes.
    pub fn eigen_residual(&self, f: &KernelMatrix) -> f64 {
        let mut worst: f64 = 0.0;
        for (mu, e) in self.mus.iter().zip(&self.efuns).take(self.resolved()) {
            let fe = f.apply(e);
            worst = worst.max(fe.combine(c64::new(1.0, 0.0), e, c64::new(-mu, 0.0)).norm());
        }
        worst
    }

    /// `max_n |μ_n² − ν_n|` with `ν` the eigenvalues of `D` in decreasing
    /// order, over the resolved modes.
    pub fn d_consistency(&self, d: &KernelMatrix) -> Result<f64> {
        if d.kind() != KernelKind::DLambda {
            return Err(Error::InvalidArgument("expected the D_λ matrix"));
        }
        let eig = symmetric_eigen(d.entries(), d.dim())?;
        let mut nu = eig.values().to_vec();
        nu.sort_by(|a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
        Ok(self
            .mus
            .iter()
            .zip(&nu)
            .take(self.resolved())
            .map(|(m, v)| (m * m - v).abs())
            .fold(0.0, f64::max))
    }

    /// Eigen-expansion `Σ ⟨g, e_n⟩ f(μ_n) e_n`.
    pub fn spectral_apply(&self, g: &InnerFunction, f: impl Fn(f64) -> f64) -> InnerFunction {
        let mut acc = InnerFunction::zero(self.rule.clone());
        for (mu, e) in self.mus.iter().zip(&self.efuns) {
            let c = g.inner(e) * f(*mu);
            acc = acc.combine(c64::new(1.0, 0.0), e, c);
        }
        acc
    }
}

/// Sign changes of the samples, used to order nearly degenerate modes.
fn zero_count(v: &[f64]) -> usize {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut last = 0.0;
    let mut count = 0;
    for &x in v {
        if x.abs() <= 1e-8 * scale {
            continue;
        }
        if last != 0.0 && (x > 0.0) != (last > 0.0) {
            count += 1;
        }
        last = x;
    }
    count
}

/// Full eigendecomposition of the `F_λ` matrix. Eigenvectors are normalised
/// in the half-line inner product and signed so that `e_{2n}` is positive at
/// the smallest node.
pub fn prolate_eigen(f: &KernelMatrix) -> Result<ProlateBasis> {
    if f.kind() != KernelKind::FLambda {
        return Err(Error::InvalidArgument("expected the F_λ matrix"));
    }
    let n = f.dim();
    let eig = symmetric_eigen(f.entries(), n)?;
    let rule = f.rule().clone();
    let sqrt_w: Vec<f64> = rule.weights().iter().map(|w| w.sqrt()).collect();

    let mut modes: Vec<(f64, Vec<f64>, usize)> = (0..n)
        .map(|k| {
            let mut v: Vec<f64> = (0..n).map(|i| eig.vector_entry(i, k) / sqrt_w[i]).collect();
            let lead = v.iter().copied().find(|x| *x != 0.0).unwrap_or(1.0);
            if lead < 0.0 {
                for x in v.iter_mut() {
                    *x = -*x;
                }
            }
            let zeros = zero_count(&v);
            (eig.values()[k], v, zeros)
        })
        .collect();
    modes.sort_by(|a, b| {
        let (x, y) = (a.0.abs(), b.0.abs());
        if (x - y).abs() <= 1e-14 * x.max(y) && x > RESOLVED_CUTOFF {
            a.2.cmp(&b.2)
        } else {
            y.partial_cmp(&x).unwrap_or(core::cmp::Ordering::Equal)
        }
    });

    let mut mus = Vec::with_capacity(n);
    let mut efuns = Vec::with_capacity(n);
    for (mu, v, _) in modes {
        mus.push(mu);
        let values = v.into_iter().map(|x| c64::new(x, 0.0)).collect();
        efuns.push(InnerFunction::new(rule.clone(), values)?);
    }
    Ok(ProlateBasis { rule, mus, efuns })
}

/// A factorised `I + sign·M` in `√w` coordinates.
#[derive(Clone, Debug)]
pub struct Resolvent {
    rule: Arc<QuadratureRule>,
    kind: KernelKind,
    sign: f64,
    matrix: Vec<f64>,
    factor: Cholesky,
}

/// A solve together with its diagnostics.
#[derive(Clone, Debug)]
pub struct Solution {
    pub u: InnerFunction,
    /// `‖(1 + sign·M)u − g‖ / ‖g‖` (zero for `g = 0`).
    pub residual: f64,
}

impl Resolvent {
    /// Factorises `I + sign·M`. Fails with a numeric error when the system is
    /// singular to working precision.
    pub fn new(m: &KernelMatrix, sign: f64) -> Result<Self> {
        if sign != 1.0 && sign != -1.0 {
            return Err(Error::InvalidArgument("sign must be ±1"));
        }
        let n = m.dim();
        let mut a: Vec<f64> = m.entries().iter().map(|x| sign * x).collect();
        for i in 0..n {
            a[i * n + i] += 1.0;
        }
        let factor = Cholesky::new(&a, n)
            .map_err(|_| Error::Numeric("resolvent is singular to working precision"))?;
        Ok(Self {
            rule: m.rule().clone(),
            kind: m.kind(),
            sign,
            matrix: a,
            factor,
        })
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn sign(&self) -> f64 {
        self.sign
    }

    /// Ratio of extreme squared Cholesky pivots, a cheap lower bound on the
    /// 2-norm condition number.
    pub fn condition_estimate(&self) -> f64 {
        self.factor.pivot_ratio()
    }

    pub fn solve(&self, g: &InnerFunction) -> Solution {
        let mut coords = g.to_symmetric();
        self.factor.solve_complex_in_place(&mut coords);
        let n = self.factor.dim();
        let back = crate::linalg::mat_vec(&self.matrix, n, &coords);
        let gs = g.to_symmetric();
        let r: f64 = back
            .iter()
            .zip(&gs)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let gn = g.norm();
        let residual = if gn == 0.0 { r } else { r / gn };
        Solution {
            u: InnerFunction::from_symmetric(self.rule.clone(), coords),
            residual,
        }
    }
}

/// `(1 + sign·F_λ) u = g`.
pub fn solve_resolvent(f: &KernelMatrix, sign: f64, g: &InnerFunction) -> Result<Solution> {
    if f.kind() != KernelKind::FLambda {
        return Err(Error::InvalidArgument("expected the F_λ matrix"));
    }
    Ok(Resolvent::new(f, sign)?.solve(g))
}

/// `(1 − D_λ) u = g`.
pub fn solve_one_minus_d(d: &KernelMatrix, g: &InnerFunction) -> Result<Solution> {
    if d.kind() != KernelKind::DLambda {
        return Err(Error::InvalidArgument("expected the D_λ matrix"));
    }
    Ok(Resolvent::new(d, -1.0)?.solve(g))
}

/// Which Fredholm determinant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DetKind {
    OneMinusF,
    OnePlusF,
    OneMinusD,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Determinant {
    pub value: f64,
    /// Set when the smallest retained `|μ|` is above the cut-off, so factors
    /// that matter may be missing.
    pub unresolved: bool,
}

pub fn fredholm_det(basis: &ProlateBasis, which: DetKind) -> Determinant {
    let mut ln = 0.0;
    let mut sign = 1.0;
    for &mu in basis.mus() {
        let shift = match which {
            DetKind::OneMinusF => -mu,
            DetKind::OnePlusF => mu,
            DetKind::OneMinusD => -mu * mu,
        };
        if shift.abs() < DET_CUTOFF {
            continue;
        }
        let factor = 1.0 + shift;
        if factor < 0.0 {
            sign = -sign;
        }
        ln += if shift > -0.5 {
            shift.ln_1p()
        } else {
            factor.abs().ln()
        };
    }
    let smallest = basis.mus().last().map_or(0.0, |m| m.abs());
    let threshold = match which {
        DetKind::OneMinusD => DET_CUTOFF.sqrt(),
        _ => DET_CUTOFF,
    };
    Determinant {
        value: sign * ln.exp(),
        unresolved: smallest > threshold,
    }
}

/// Residual of `(P + P̃)h = (1 ± μ_n)h` for `h = e_{2n}·1_{(0,λ)} ± F_+e_{2n}`,
/// where `P` restricts to `(0, λ)` and `P̃ = F_+ P F_+`.
///
/// `P̃h` is assembled from `F_+² = 1`: `F_+h = F_+e ± e` so `P F_+ h` is
/// sampled at the nodes and transformed back with the quadrature. Off-node
/// values of `e` on `(0, λ)` come from interpolation. The sup is taken over
/// `grid`.
pub fn lemma_residual(basis: &ProlateBasis, mode: usize, sign: f64, grid: &[f64]) -> f64 {
    let e = &basis.efuns()[mode];
    let mu = basis.mus()[mode];
    let lambda = e.lambda();
    let one = c64::new(1.0, 0.0);
    let pfh_nodes: Vec<c64> = e
        .rule()
        .nodes()
        .iter()
        .zip(e.values())
        .map(|(&y, &v)| cosine_transform_of_inner(e, y) + v * sign)
        .collect();
    let pfh = InnerFunction::new(e.rule().clone(), pfh_nodes).expect("finite samples");
    let mut worst: f64 = 0.0;
    for &x in grid {
        let inner = if x < lambda {
            e.interpolate(x)
        } else {
            c64::new(0.0, 0.0)
        };
        let fe = cosine_transform_of_inner(e, x);
        let h = inner + fe * sign;
        let ph = if x < lambda { h } else { c64::new(0.0, 0.0) };
        let lhs = ph + cosine_transform_of_inner(&pfh, x);
        let rhs = h * (one + sign * mu);
        worst = worst.max((lhs - rhs).norm());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{build_d_lambda, build_f_lambda};
    use crate::numerics::gauss_legendre;

    fn setup(n: usize, lambda: f64) -> (KernelMatrix, KernelMatrix, ProlateBasis) {
        let rule = Arc::new(gauss_legendre(n, 0.0, lambda).unwrap());
        let f = build_f_lambda(&rule).unwrap();
        let d = build_d_lambda(&rule).unwrap();
        let b = prolate_eigen(&f).unwrap();
        (f, d, b)
    }

    #[test]
    fn basis_is_orthonormal_sorted_and_alternating() {
        let (f, d, b) = setup(80, 1.0);
        assert!(b.orthonormality_defect() < 1e-12);
        assert!(b.eigen_residual(&f) < 1e-12);
        assert!(b.d_consistency(&d).unwrap() < 1e-12);
        let r = b.resolved();
        assert!(r > 5);
        for k in 1..r {
            assert!(b.mus()[k].abs() < b.mus()[k - 1].abs());
            assert!(b.mus()[k] * b.mus()[k - 1] < 0.0);
        }
        for e in b.efuns() {
            assert!(e.values()[0].re > 0.0);
        }
    }

    #[test]
    fn eigenvector_zero_counts_follow_mode_index() {
        let (_, _, b) = setup(80, 1.0);
        for k in 0..b.resolved() {
            let v: Vec<f64> = b.efuns()[k].values().iter().map(|c| c.re).collect();
            assert_eq!(zero_count(&v), k);
        }
    }

    #[test]
    fn resolvent_of_eigenvector() {
        let (f, d, b) = setup(60, 0.7);
        for sign in [1.0, -1.0] {
            let s = solve_resolvent(&f, sign, &b.efuns()[1]).unwrap();
            let expect = b.efuns()[1].scale(c64::new(1.0 / (1.0 + sign * b.mus()[1]), 0.0));
            assert!(
                s.u.combine(c64::new(1.0, 0.0), &expect, c64::new(-1.0, 0.0))
                    .sup()
                    < 1e-12
            );
            assert!(s.residual < 1e-14);
        }
        let s = solve_one_minus_d(&d, &b.efuns()[0]).unwrap();
        let mu = b.mus()[0];
        assert!((s.u.values()[3] - b.efuns()[0].values()[3] / (1.0 - mu * mu)).norm() < 1e-11);
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let (f, _, b) = setup(20, 1.0);
        let z = InnerFunction::zero(b.rule().clone());
        let s = solve_resolvent(&f, 1.0, &z).unwrap();
        assert_eq!(s.u.sup(), 0.0);
        assert_eq!(s.residual, 0.0);
    }

    #[test]
    fn determinants_factor() {
        let (_, _, b) = setup(60, 1.0);
        let m = fredholm_det(&b, DetKind::OneMinusF).value;
        let p = fredholm_det(&b, DetKind::OnePlusF).value;
        let d = fredholm_det(&b, DetKind::OneMinusD);
        assert!((d.value - m * p).abs() < 1e-12 * d.value.abs());
        assert!(!d.unresolved);
    }

    #[test]
    fn lemma_identity_on_top_modes() {
        let (_, _, b) = setup(80, 1.0);
        let grid: Vec<f64> = (1..60).map(|k| 3.0 * k as f64 / 60.0).collect();
        for k in 0..6 {
            for sign in [1.0, -1.0] {
                assert!(lemma_residual(&b, k, sign, &grid) < 1e-10, "{k} {sign}");
            }
        }
    }
}
