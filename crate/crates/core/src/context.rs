use alloc::sync::Arc;
#[allow(unused_imports)] // inherent f64 math is only visible when std is linked
use num_traits::Float;

use crate::c64;
use crate::error::{Error, Result};
use crate::kernels::{build_d_lambda, build_f_lambda, InnerFunction, KernelMatrix};
use crate::numerics::{gauss_legendre, QuadratureRule};
use crate::prolate::{prolate_eigen, ProlateBasis, Resolvent};

/// Everything that depends only on `(λ, n)`: the inner rule, both kernel
/// matrices, the prolate basis and the three factorised resolvents.
///
/// A resolvent that is singular to working precision is kept as its error so
/// that operations not needing it still run.
#[derive(Clone, Debug)]
pub struct SonineContext {
    lambda: f64,
    rule: Arc<QuadratureRule>,
    f: KernelMatrix,
    d: KernelMatrix,
    basis: ProlateBasis,
    plus: Result<Resolvent>,
    minus: Result<Resolvent>,
    one_minus_d: Result<Resolvent>,
    t_out: Option<f64>,
}

impl SonineContext {
    pub fn new(lambda: f64, n: usize) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidArgument("λ must be positive and finite"));
        }
        let rule = Arc::new(gauss_legendre(n, 0.0, lambda)?);
        let f = build_f_lambda(&rule)?;
        let d = build_d_lambda(&rule)?;
        let basis = prolate_eigen(&f)?;
        Ok(Self {
            lambda,
            plus: Resolvent::new(&f, 1.0),
            minus: Resolvent::new(&f, -1.0),
            one_minus_d: Resolvent::new(&d, -1.0),
            rule,
            f,
            d,
            basis,
            t_out: None,
        })
    }

    /// Fixes the truncation point of numeric cosine transforms and outer
    /// integrals instead of choosing it from each decay certificate.
    pub fn with_t_out(mut self, t_out: f64) -> Result<Self> {
        if !(t_out > self.lambda) || !t_out.is_finite() {
            return Err(Error::InvalidArgument("t_out must exceed λ"));
        }
        self.t_out = Some(t_out);
        Ok(self)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn rule(&self) -> &Arc<QuadratureRule> {
        &self.rule
    }

    pub fn n(&self) -> usize {
        self.rule.len()
    }

    pub fn f_matrix(&self) -> &KernelMatrix {
        &self.f
    }

    pub fn d_matrix(&self) -> &KernelMatrix {
        &self.d
    }

    pub fn basis(&self) -> &ProlateBasis {
        &self.basis
    }

    pub fn t_out(&self) -> Option<f64> {
        self.t_out
    }

    /// The factorised `1 + sign·F_λ`.
    pub fn resolvent(&self, sign: f64) -> Result<&Resolvent> {
        let r = if sign > 0.0 { &self.plus } else { &self.minus };
        r.as_ref().map_err(|e| e.clone())
    }

    /// The factorised `1 − D_λ`.
    pub fn one_minus_d(&self) -> Result<&Resolvent> {
        self.one_minus_d.as_ref().map_err(|e| e.clone())
    }

    /// Samples of `f` at the inner nodes.
    pub fn sample(&self, f: impl FnMut(f64) -> c64) -> Result<InnerFunction> {
        InnerFunction::from_fn(self.rule.clone(), f)
    }

    /// `F_λ u` on the nodes.
    pub fn apply_f(&self, u: &InnerFunction) -> InnerFunction {
        self.f.apply(u)
    }
}
