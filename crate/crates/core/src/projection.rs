//! Orthogonal projection onto the Sonine space `K_λ`, the Sonine verifier and
//! the evaluators `X_w`.
//!
//! Every function here has the two-piece shape
//! `g = 1_{(0,λ)}·p + 1_{(λ,∞)}·(f − F_+ρ)` with `f` a closed-form
//! [`EvenFunction`], `ρ` a [`Density`] on `(0, λ)` and `p` sampled. Sonine
//! functions have `p = 0`.
//!
//! Integrals over `(λ, ∞)` involving `F_+ρ` are never truncated: `F_+ρ`
//! decays only like `1/t`. They are moved onto `(0, λ)` with
//! `∫_0^∞ F_+a · b̄ = ∫_0^∞ a · conj(F_+b)` and `F_+² = 1`.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // inherent f64 math is only visible when std is linked
use num_traits::Float;

use crate::c64;
use crate::context::SonineContext;
use crate::error::{Error, Result};
use crate::kernels::{
    cosine_transform_of_inner, default_t_out, transform_on, DecayingFunction, InnerFunction,
};
use crate::mellin::MellinProbe;
use crate::numerics::{adaptive, cosine_power_tail, Estimate};

/// Target for the certified tail of numeric transforms.
const TAIL_TARGET: f64 = 1e-15;
/// Largest admissible relative cancellation residual on `(0, λ)`.
const CANCELLATION_TOL: f64 = 1e-9;

const ONE: c64 = c64::new(1.0, 0.0);
const ZERO: c64 = c64::new(0.0, 0.0);

/// Even functions on `t ≥ 0` with closed-form values, decay certificates
/// and, where available, closed-form cosine transforms.
#[derive(Clone, Debug, PartialEq)]
pub enum EvenFunction {
    Zero,
    /// `c · e^{−απt²} cos(2πβt)`, `α > 0`.
    GaussCos {
        c: c64,
        alpha: f64,
        beta: c64,
    },
    /// `(a t² + b) e^{−πt²}`.
    Hermite2 {
        a: c64,
        b: c64,
    },
    Sum(Vec<EvenFunction>),
    /// `1_{t > cut} f(t)`.
    OneSided {
        cut: f64,
        f: Box<EvenFunction>,
    },
    /// `1_{t > cut} t^{−w}`.
    PowerTail {
        cut: f64,
        w: c64,
    },
}

impl EvenFunction {
    /// `e^{−απt²}`.
    pub fn gaussian(alpha: f64) -> Self {
        EvenFunction::GaussCos {
            c: ONE,
            alpha,
            beta: ZERO,
        }
    }

    /// `2^{1/4} e^{−πt²}`, fixed by `F_+` (unit norm on the whole line).
    pub fn unit_gaussian() -> Self {
        EvenFunction::GaussCos {
            c: c64::new(2f64.powf(0.25), 0.0),
            alpha: 1.0,
            beta: ZERO,
        }
    }

    /// `e^{−πt²} cos(2πbt)`.
    pub fn gauss_cos(b: f64) -> Self {
        EvenFunction::GaussCos {
            c: ONE,
            alpha: 1.0,
            beta: c64::new(b, 0.0),
        }
    }

    /// `(t² − 1/(4π)) e^{−πt²}`, which `F_+` maps to its negative.
    pub fn hermite_anti() -> Self {
        EvenFunction::Hermite2 {
            a: ONE,
            b: c64::new(-0.25 / PI, 0.0),
        }
    }

    pub fn one_sided(cut: f64, f: EvenFunction) -> Self {
        EvenFunction::OneSided {
            cut,
            f: Box::new(f),
        }
    }

    pub fn value(&self, t: f64) -> c64 {
        match self {
            EvenFunction::Zero => ZERO,
            EvenFunction::GaussCos { c, alpha, beta } => {
                c * (-alpha * PI * t * t).exp() * (beta * (2.0 * PI * t)).cos()
            }
            EvenFunction::Hermite2 { a, b } => (a * (t * t) + b) * (-PI * t * t).exp(),
            EvenFunction::Sum(v) => v.iter().map(|f| f.value(t)).sum(),
            EvenFunction::OneSided { cut, f } => {
                if t > *cut {
                    f.value(t)
                } else {
                    ZERO
                }
            }
            EvenFunction::PowerTail { cut, w } => {
                if t > *cut {
                    (-w * t.ln()).exp()
                } else {
                    ZERO
                }
            }
        }
    }

    /// `F_+f` when it has a closed form in this family.
    pub fn closed_transform(&self) -> Option<EvenFunction> {
        match self {
            EvenFunction::Zero => Some(EvenFunction::Zero),
            EvenFunction::GaussCos { c, alpha, beta } => {
                let i = c64::new(0.0, 1.0);
                Some(EvenFunction::GaussCos {
                    c: c / alpha.sqrt() * (-PI * beta * beta / *alpha).exp(),
                    alpha: 1.0 / alpha,
                    beta: i * beta / *alpha,
                })
            }
            EvenFunction::Hermite2 { a, b } => Some(EvenFunction::Hermite2 {
                a: -a,
                b: a / (2.0 * PI) + b,
            }),
            EvenFunction::Sum(v) => v
                .iter()
                .map(|f| f.closed_transform())
                .collect::<Option<Vec<_>>>()
                .map(EvenFunction::Sum),
            EvenFunction::OneSided { .. } | EvenFunction::PowerTail { .. } => None,
        }
    }

    /// `F_+f(x)`: closed form, `2C(2πx, w)` for power tails, otherwise a
    /// certified numeric transform truncated at `t_out`.
    pub fn transform_at(&self, x: f64, t_out: f64) -> Result<Estimate> {
        if let Some(g) = self.closed_transform() {
            let v = g.value(x);
            return Ok(Estimate {
                value: v,
                err: 8.0 * f64::EPSILON * v.norm(),
            });
        }
        match self {
            EvenFunction::Sum(v) => {
                let mut total = Estimate::ZERO;
                for f in v {
                    total += f.transform_at(x, t_out)?;
                }
                Ok(total)
            }
            EvenFunction::PowerTail { cut, w } => {
                let c = cosine_power_tail(2.0 * PI * x.abs(), *w, *cut)?;
                Ok(Estimate {
                    value: c.value * 2.0,
                    err: 2.0 * c.err,
                })
            }
            EvenFunction::OneSided { cut, f } => match &**f {
                EvenFunction::PowerTail { cut: c2, w } => EvenFunction::PowerTail {
                    cut: cut.max(*c2),
                    w: *w,
                }
                .transform_at(x, t_out),
                _ => transform_on(self, x, *cut, t_out.max(*cut * (1.0 + 1e-12))),
            },
            _ => unreachable!("closed forms handled above"),
        }
    }

    /// A bound for `|f(s)|` valid for every `s` and non-increasing on
    /// `s ≥ t`; `None` if monotonicity is not certified at `t`.
    pub fn envelope(&self, t: f64) -> Option<f64> {
        match self {
            EvenFunction::Zero => Some(0.0),
            EvenFunction::GaussCos { c, alpha, beta } => {
                let t0 = beta.im.abs() / alpha;
                if t < t0 {
                    return None;
                }
                Some(c.norm() * (-alpha * PI * t * t + 2.0 * PI * beta.im.abs() * t).exp())
            }
            EvenFunction::Hermite2 { a, b } => {
                if t < 1.0 {
                    return None;
                }
                Some((a.norm() * t * t + b.norm()) * (-PI * t * t).exp())
            }
            EvenFunction::Sum(v) => v.iter().map(|f| f.envelope(t)).sum(),
            EvenFunction::OneSided { f, .. } => f.envelope(t),
            EvenFunction::PowerTail { w, .. } => {
                if w.re <= 0.0 || t <= 0.0 {
                    None
                } else {
                    Some(t.powf(-w.re))
                }
            }
        }
    }

    /// A bound for `∫_T^∞ |f|`.
    pub fn tail_mass(&self, t: f64) -> Option<f64> {
        match self {
            EvenFunction::Zero => Some(0.0),
            EvenFunction::GaussCos { c, alpha, beta } => {
                let t0 = beta.im.abs() / alpha;
                let peak = (alpha * PI * t0 * t0).exp();
                Some(
                    c.norm() * peak * libm::erfc((alpha * PI).sqrt() * (t - t0))
                        / (2.0 * alpha.sqrt()),
                )
            }
            EvenFunction::Hermite2 { a, b } => {
                let t = t.max(0.0);
                let e = libm::erfc(PI.sqrt() * t);
                Some(
                    a.norm() * (t * (-PI * t * t).exp() / (2.0 * PI) + e / (4.0 * PI))
                        + b.norm() * e / 2.0,
                )
            }
            EvenFunction::Sum(v) => v.iter().map(|f| f.tail_mass(t)).sum(),
            EvenFunction::OneSided { cut, f } => f.tail_mass(t.max(*cut)),
            EvenFunction::PowerTail { cut, w } => {
                if w.re <= 1.0 {
                    None
                } else {
                    Some(t.max(*cut).powf(1.0 - w.re) / (w.re - 1.0))
                }
            }
        }
    }

    /// A bound for `∫_T^∞ |f|²`.
    pub fn l2_tail(&self, t: f64) -> Option<f64> {
        match self {
            EvenFunction::PowerTail { cut, w } if w.re > 0.5 => {
                Some(t.max(*cut).powf(1.0 - 2.0 * w.re) / (2.0 * w.re - 1.0))
            }
            _ => Some(self.envelope(t)? * self.tail_mass(t)?),
        }
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            EvenFunction::Sum(v) => v.iter().flat_map(|f| f.breakpoints()).collect(),
            EvenFunction::OneSided { cut, f } => {
                let mut b = f.breakpoints();
                b.push(*cut);
                b
            }
            EvenFunction::PowerTail { cut, .. } => alloc::vec![*cut],
            _ => Vec::new(),
        }
    }

    /// True when `f = 0` on `(0, λ)` by construction.
    pub fn vanishes_below(&self, lambda: f64) -> bool {
        match self {
            EvenFunction::Zero => true,
            EvenFunction::Sum(v) => v.iter().all(|f| f.vanishes_below(lambda)),
            EvenFunction::OneSided { cut, .. } | EvenFunction::PowerTail { cut, .. } => {
                *cut >= lambda
            }
            _ => false,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            EvenFunction::Zero => true,
            EvenFunction::Sum(v) => v.iter().all(|f| f.is_zero()),
            EvenFunction::OneSided { f, .. } => f.is_zero(),
            EvenFunction::GaussCos { c, .. } => *c == ZERO,
            EvenFunction::Hermite2 { a, b } => *a == ZERO && *b == ZERO,
            EvenFunction::PowerTail { .. } => false,
        }
    }

    fn contains_power(&self) -> bool {
        match self {
            EvenFunction::PowerTail { .. } => true,
            EvenFunction::Sum(v) => v.iter().any(|f| f.contains_power()),
            EvenFunction::OneSided { f, .. } => f.contains_power(),
            _ => false,
        }
    }

    /// `∫_a^∞ f ḡ` by adaptive quadrature up to `t_out` plus the
    /// Cauchy–Schwarz bound on the remainder.
    pub fn inner_on(&self, other: &EvenFunction, a: f64, t_out: f64) -> Result<Estimate> {
        if self.is_zero() || other.is_zero() {
            return Ok(Estimate::ZERO);
        }
        if let (
            EvenFunction::PowerTail { cut: c1, w: w1 },
            EvenFunction::PowerTail { cut: c2, w: w2 },
        ) = (self, other)
        {
            let start = a.max(*c1).max(*c2);
            let s = w1 + w2.conj() - 1.0;
            if s.re <= 0.0 {
                return Err(Error::Domain("power tails are not square integrable"));
            }
            let v = (-s * start.ln()).exp() / s;
            return Ok(Estimate {
                value: v,
                err: 8.0 * f64::EPSILON * v.norm(),
            });
        }
        let end = t_out.max(a);
        let tail = match (self.l2_tail(end), other.l2_tail(end)) {
            (Some(x), Some(y)) => (x * y).sqrt(),
            _ => {
                return Err(Error::Contract(
                    "no L² tail certificate at the truncation point",
                ))
            }
        };
        let mut cuts: Vec<f64> = self
            .breakpoints()
            .into_iter()
            .chain(other.breakpoints())
            .filter(|&b| b > a && b < end)
            .collect();
        cuts.push(end);
        cuts.sort_by(|p, q| p.partial_cmp(q).unwrap_or(core::cmp::Ordering::Equal));
        let mut f = |t: f64| self.value(t) * other.value(t).conj();
        let mut total = Estimate::ZERO;
        let mut lo = a;
        for hi in cuts {
            let mut x = lo;
            while x < hi {
                let y = (x + 0.5).min(hi);
                total += adaptive(&mut f, x, y, 1e-18, 1e-15);
                x = y;
            }
            lo = hi;
        }
        total.err += tail;
        Ok(total)
    }

    /// `‖f‖ = (∫_0^∞ |f|²)^{1/2}`.
    pub fn norm(&self, t_out: f64) -> Result<f64> {
        Ok(self.inner_on(self, 0.0, t_out)?.value.re.max(0.0).sqrt())
    }
}

impl DecayingFunction for EvenFunction {
    fn value(&self, t: f64) -> c64 {
        EvenFunction::value(self, t)
    }

    fn tail_mass(&self, t: f64) -> Option<f64> {
        EvenFunction::tail_mass(self, t)
    }

    fn breakpoints(&self) -> Vec<f64> {
        EvenFunction::breakpoints(self)
    }
}

/// The five test functions used by the acceptance checks.
pub fn corpus(lambda: f64) -> Vec<(&'static str, EvenFunction)> {
    alloc::vec![
        ("gaussian", EvenFunction::gaussian(1.0)),
        ("gaussian-narrow", EvenFunction::gaussian(2.0)),
        ("hermite", EvenFunction::hermite_anti()),
        ("gauss-cos", EvenFunction::gauss_cos(0.7)),
        (
            "one-sided",
            EvenFunction::one_sided(lambda, EvenFunction::gaussian(1.0))
        ),
    ]
}

/// A density on `(0, λ)`: smooth samples plus, optionally, the singular term
/// `2C(2πy, w) = F_+(1_{t>λ} t^{−w})(y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Density {
    pub smooth: InnerFunction,
    pub power: Option<c64>,
}

impl Density {
    pub fn smooth(u: InnerFunction) -> Self {
        Density {
            smooth: u,
            power: None,
        }
    }

    /// `F_+ρ(t)`; the power term goes through a probe of matching bandwidth.
    pub fn transform_at(&self, t: f64) -> Result<Estimate> {
        let mut est = Estimate::exact(cosine_transform_of_inner(&self.smooth, t));
        if let Some(w) = self.power {
            let lambda = self.smooth.lambda();
            let probe = MellinProbe::with_bandwidth(lambda, w, t.abs())?;
            est += probe.apply_fn(|y| c64::new(2.0 * (2.0 * PI * t * y).cos(), 0.0));
        }
        Ok(est)
    }
}

/// `1_{t>λ}(explicit − F_+density)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OuterFunction {
    pub explicit: EvenFunction,
    pub density: Density,
}

impl OuterFunction {
    pub fn value(&self, t: f64) -> Result<c64> {
        Ok(self.explicit.value(t) - self.density.transform_at(t)?.value)
    }
}

/// An element of `K_λ`: zero on `(0, λ)` by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct SonineFunction {
    pub lambda: f64,
    pub outer: OuterFunction,
    /// Sup over the nodes of the discarded inner part.
    pub inner_residual: f64,
    pub source: String,
}

impl SonineFunction {
    pub fn value(&self, t: f64) -> Result<c64> {
        if t <= self.lambda {
            Ok(ZERO)
        } else {
            self.outer.value(t)
        }
    }

    pub fn density(&self) -> &InnerFunction {
        &self.outer.density.smooth
    }
}

/// The data projection needs: samples of `f` and `F_+f` on the nodes and
/// the two-piece form of `f` beyond `λ`.
#[derive(Clone, Debug)]
pub struct ProjectionInput {
    pub p: InnerFunction,
    pub q: InnerFunction,
    pub outer: OuterFunction,
    pub source: String,
}

/// Truncation point for integrals of `f`: the context override if set,
/// otherwise where the certified tail drops below `1e-15`, at least `2λ`.
pub fn t_out_for(ctx: &SonineContext, f: &EvenFunction) -> Result<f64> {
    if let Some(t) = ctx.t_out() {
        return Ok(t);
    }
    if f.is_zero() || (f.contains_power() && f.tail_mass(1.0).is_none()) {
        return Ok(4.0 * ctx.lambda());
    }
    Ok(default_t_out(f, TAIL_TARGET)?.max(2.0 * ctx.lambda()))
}

impl ProjectionInput {
    pub fn from_even(ctx: &SonineContext, f: &EvenFunction, source: &str) -> Result<Self> {
        let t_out = t_out_for(ctx, f)?;
        let p = ctx.sample(|y| f.value(y))?;
        let mut q = Vec::with_capacity(ctx.n());
        for &y in ctx.rule().nodes() {
            q.push(f.transform_at(y, t_out)?.value);
        }
        Ok(ProjectionInput {
            p,
            q: InnerFunction::new(ctx.rule().clone(), q)?,
            outer: OuterFunction {
                explicit: f.clone(),
                density: Density::smooth(InnerFunction::zero(ctx.rule().clone())),
            },
            source: source.into(),
        })
    }

    /// A Sonine function as input (for idempotence).
    pub fn from_sonine(ctx: &SonineContext, g: &SonineFunction) -> Result<Self> {
        let mut q = Vec::with_capacity(ctx.n());
        for &y in ctx.rule().nodes() {
            q.push(outer_transform(ctx, &g.outer, y)?.value);
        }
        Ok(ProjectionInput {
            p: InnerFunction::zero(ctx.rule().clone()),
            q: InnerFunction::new(ctx.rule().clone(), q)?,
            outer: g.outer.clone(),
            source: g.source.clone(),
        })
    }

    /// `h = e·1_{(0,λ)} + sign·F_+e` for a density `e` on `(0, λ)`.
    pub fn from_inner_plus_transform(
        ctx: &SonineContext,
        e: &InnerFunction,
        sign: f64,
        source: &str,
    ) -> Self {
        let fe = ctx.apply_f(e);
        let s = c64::new(sign, 0.0);
        // F_+h = F_+e + sign·e, so on the nodes q = F e + sign·e
        let p = e.combine(ONE, &fe, s);
        let q = fe.combine(ONE, e, s);
        ProjectionInput {
            p,
            q,
            outer: OuterFunction {
                explicit: EvenFunction::Zero,
                density: Density::smooth(e.scale(-s)),
            },
            source: source.into(),
        }
    }
}

/// `F_+(1_{t>λ}·explicit)(x)`.
pub(crate) fn explicit_transform(
    ctx: &SonineContext,
    explicit: &EvenFunction,
    x: f64,
) -> Result<Estimate> {
    let lambda = ctx.lambda();
    if explicit.is_zero() {
        return Ok(Estimate::ZERO);
    }
    if explicit.vanishes_below(lambda) {
        return explicit.transform_at(x, t_out_for(ctx, explicit)?);
    }
    let one_sided = EvenFunction::one_sided(lambda, explicit.clone());
    one_sided.transform_at(x, t_out_for(ctx, explicit)?)
}

/// `F_+(1_{t>λ} F_+ρ)(x) = ρ(x)·1_{x<λ} − F_+(P F_+ρ)(x)`: the transform of
/// the density term of an outer function.
fn density_outer_transform(ctx: &SonineContext, rho: &Density, x: f64) -> Result<Estimate> {
    let lambda = ctx.lambda();
    let mut pf = ctx.apply_f(&rho.smooth);
    let mut inside = if x < lambda {
        rho.smooth.interpolate(x)
    } else {
        ZERO
    };
    let mut err = 0.0;
    if let Some(w) = rho.power {
        // P F_+ b on the nodes, b(y) = 2C(2πy, w)
        let probe = MellinProbe::new(lambda, w)?;
        let mut extra = Vec::with_capacity(ctx.n());
        for &y in ctx.rule().nodes() {
            let e = probe.apply_fn(|z| c64::new(2.0 * (2.0 * PI * y * z).cos(), 0.0));
            err = f64::max(err, e.err);
            extra.push(e.value);
        }
        pf = pf.combine(ONE, &InnerFunction::new(ctx.rule().clone(), extra)?, ONE);
        if x < lambda {
            let c = cosine_power_tail(2.0 * PI * x, w, lambda)?;
            inside += c.value * 2.0;
            err += 2.0 * c.err;
        }
    }
    Ok(Estimate {
        value: inside - cosine_transform_of_inner(&pf, x),
        err: err * 2.0 * lambda,
    })
}

/// `F_+g(x)` for `g = 1_{t>λ}·outer`.
pub fn outer_transform(ctx: &SonineContext, outer: &OuterFunction, x: f64) -> Result<Estimate> {
    let e = explicit_transform(ctx, &outer.explicit, x)?;
    let d = density_outer_transform(ctx, &outer.density, x)?;
    Ok(Estimate {
        value: e.value - d.value,
        err: e.err + d.err,
    })
}

fn finish(
    ctx: &SonineContext,
    input: &ProjectionInput,
    alpha: &InnerFunction,
    beta: InnerFunction,
    tag: &str,
) -> Result<SonineFunction> {
    // inner part p − α − F_λβ, which the projection kills
    let fb = ctx.apply_f(&beta);
    let leftover = input.p.combine(ONE, alpha, -ONE).combine(ONE, &fb, -ONE);
    let residual = leftover.sup();
    let scale = input.p.sup().max(input.q.sup()).max(1e-300);
    if residual > CANCELLATION_TOL * scale.max(1.0) {
        return Err(Error::Accuracy {
            what: "inner cancellation",
            residual,
            tolerance: CANCELLATION_TOL * scale.max(1.0),
        });
    }
    let density = Density {
        smooth: input.outer.density.smooth.combine(ONE, &beta, ONE),
        power: input.outer.density.power,
    };
    let mut source = String::from(tag);
    source.push('(');
    source.push_str(&input.source);
    source.push(')');
    Ok(SonineFunction {
        lambda: ctx.lambda(),
        outer: OuterFunction {
            explicit: input.outer.explicit.clone(),
            density,
        },
        inner_residual: residual,
        source,
    })
}

/// The general route: with `p = P f`, `q = P F_+f`,
/// `α = (1 − D)^{-1}(p − F_λ q)` and `β = (1 − D)^{-1}(q − F_λ p)`,
/// `π f = f − α − F_+β`. Beyond `λ` this is `f − F_+β`.
pub fn project_input(ctx: &SonineContext, input: &ProjectionInput) -> Result<SonineFunction> {
    let res = ctx.one_minus_d()?;
    let fq = ctx.apply_f(&input.q);
    let fp = ctx.apply_f(&input.p);
    let alpha = res.solve(&input.p.combine(ONE, &fq, -ONE)).u;
    let beta = res.solve(&input.q.combine(ONE, &fp, -ONE)).u;
    finish(ctx, input, &alpha, beta, "project")
}

pub fn project(ctx: &SonineContext, f: &EvenFunction) -> Result<SonineFunction> {
    let input = ProjectionInput::from_even(ctx, f, "f")?;
    project_input(ctx, &input)
}

/// `π f` for `f` vanishing on `(0, λ)`: only `β = (1 − D)^{-1} P F_+f` is
/// needed.
pub fn project_vanishing_inner(ctx: &SonineContext, f: &EvenFunction) -> Result<SonineFunction> {
    if !f.vanishes_below(ctx.lambda()) {
        return Err(Error::Contract("function does not vanish on (0, λ)"));
    }
    let input = ProjectionInput::from_even(ctx, f, "f")?;
    let res = ctx.one_minus_d()?;
    let beta = res.solve(&input.q).u;
    // p = 0 here, so α = −(1 − D)^{-1} F q; the cancellation p − α − Fβ is
    // still checked with it
    let alpha = res.solve(&ctx.apply_f(&input.q)).u.scale(-ONE);
    finish(ctx, &input, &alpha, beta, "project-vanishing")
}

/// `π f = f − (1 + sign·F_+)(1 + sign·F_λ)^{-1} P f` for `F_+f = sign·f`.
pub fn project_self_reciprocal_input(
    ctx: &SonineContext,
    input: &ProjectionInput,
    sign: f64,
) -> Result<SonineFunction> {
    let defect = input.q.combine(ONE, &input.p, c64::new(-sign, 0.0)).sup();
    if defect > 1e-10 * input.p.sup().max(1.0) {
        return Err(Error::Contract(
            "input is not self-reciprocal with the given sign",
        ));
    }
    let u = ctx.resolvent(sign)?.solve(&input.p).u;
    // inside: p − u − sign·F_λu = 0; beyond λ the correction is sign·F_+u
    let alpha = u.clone();
    let beta = u.scale(c64::new(sign, 0.0));
    finish(ctx, input, &alpha, beta, "project-self-reciprocal")
}

pub fn project_self_reciprocal(
    ctx: &SonineContext,
    f: &EvenFunction,
    sign: f64,
) -> Result<SonineFunction> {
    let input = ProjectionInput::from_even(ctx, f, "f")?;
    project_self_reciprocal_input(ctx, &input, sign)
}

/// Projection through the `F_+`-eigencomponents `f_± = (f ± F_+f)/2`:
/// `β = (1 + F_λ)^{-1} P f_+ − (1 − F_λ)^{-1} P f_−`.
pub fn project_via_parity(ctx: &SonineContext, f: &EvenFunction) -> Result<SonineFunction> {
    let input = ProjectionInput::from_even(ctx, f, "f")?;
    let half = c64::new(0.5, 0.0);
    let p_plus = input.p.combine(half, &input.q, half);
    let p_minus = input.p.combine(half, &input.q, -half);
    let u_plus = ctx.resolvent(1.0)?.solve(&p_plus).u;
    let u_minus = ctx.resolvent(-1.0)?.solve(&p_minus).u;
    let alpha = u_plus.combine(ONE, &u_minus, ONE);
    let beta = u_plus.combine(ONE, &u_minus, -ONE);
    finish(ctx, &input, &alpha, beta, "project-parity")
}

/// Projection of `1_{t>λ} f`, which has the same image since
/// `L²(0, λ) ⟂ K_λ`.
pub fn project_via_outer_part(ctx: &SonineContext, f: &EvenFunction) -> Result<SonineFunction> {
    let g = if f.vanishes_below(ctx.lambda()) {
        f.clone()
    } else {
        EvenFunction::one_sided(ctx.lambda(), f.clone())
    };
    project_vanishing_inner(ctx, &g)
}

/// `∫_λ^∞ a·conj(b)` for two outer functions with smooth densities.
pub fn outer_inner(ctx: &SonineContext, a: &OuterFunction, b: &OuterFunction) -> Result<Estimate> {
    if a.density.power.is_some() || b.density.power.is_some() {
        return Err(Error::Contract("inner products need smooth densities"));
    }
    let lambda = ctx.lambda();
    let rule = ctx.rule();
    let t_out = t_out_for(ctx, &a.explicit)?.max(t_out_for(ctx, &b.explicit)?);

    let ee = a.explicit.inner_on(&b.explicit, lambda, t_out)?;
    // ∫_λ^∞ e·conj(F_+ρ) = ∫_0^λ F_+(1_{t>λ}e)·conj(ρ)
    let cross = |e: &EvenFunction, rho: &InnerFunction| -> Result<Estimate> {
        if e.is_zero() || rho.sup() == 0.0 {
            return Ok(Estimate::ZERO);
        }
        let mut acc = Estimate::ZERO;
        for ((&y, &w), r) in rule.nodes().iter().zip(rule.weights()).zip(rho.values()) {
            let t = explicit_transform(ctx, e, y)?;
            acc += Estimate {
                value: t.value * r.conj() * w,
                err: t.err * r.norm() * w,
            };
        }
        Ok(acc)
    };
    let e_a_rho_b = cross(&a.explicit, &b.density.smooth)?;
    let e_b_rho_a = cross(&b.explicit, &a.density.smooth)?;
    // ∫_λ^∞ F_+ρ·conj(F_+σ) = ⟨ρ, σ⟩ − ⟨F_λρ, F_λσ⟩
    let ra = &a.density.smooth;
    let rb = &b.density.smooth;
    let dd = ra.inner(rb) - ctx.apply_f(ra).inner(&ctx.apply_f(rb));
    let value = ee.value - e_a_rho_b.value - e_b_rho_a.value.conj() + dd;
    let err = ee.err + e_a_rho_b.err + e_b_rho_a.err + 1e-15 * (ra.norm() * rb.norm());
    Ok(Estimate { value, err })
}

pub fn sonine_inner(
    ctx: &SonineContext,
    f: &SonineFunction,
    g: &SonineFunction,
) -> Result<Estimate> {
    outer_inner(ctx, &f.outer, &g.outer)
}

pub fn sonine_norm(ctx: &SonineContext, f: &SonineFunction) -> Result<f64> {
    Ok(sonine_inner(ctx, f, f)?.value.re.max(0.0).sqrt())
}

/// `‖f‖` on the half-line with the truncation chosen for `f`.
pub fn even_norm(ctx: &SonineContext, f: &EvenFunction) -> Result<f64> {
    f.norm(t_out_for(ctx, f)?)
}

/// `‖π g - g‖` for `g ∈ K_λ`. Both share the explicit part, so the
/// difference is `F_+` of the density change beyond `λ`.
pub fn idempotence_defect(ctx: &SonineContext, g: &SonineFunction) -> Result<f64> {
    let again = project_input(ctx, &ProjectionInput::from_sonine(ctx, g)?)?;
    let delta = OuterFunction {
        explicit: EvenFunction::Zero,
        density: Density::smooth(again.density().combine(ONE, g.density(), -ONE)),
    };
    Ok(outer_inner(ctx, &delta, &delta)?.value.re.max(0.0).sqrt())
}

/// `|⟨f - π f, g⟩|` for `g ∈ K_λ`, as `⟨f, g⟩ - ⟨π f, g⟩` with `g` zero on
/// `(0, λ)`.
pub fn orthogonality_defect(
    ctx: &SonineContext,
    f: &EvenFunction,
    pf: &SonineFunction,
    g: &SonineFunction,
) -> Result<f64> {
    let outer_f = OuterFunction {
        explicit: f.clone(),
        density: Density::smooth(InnerFunction::zero(ctx.rule().clone())),
    };
    let full = outer_inner(ctx, &outer_f, &g.outer)?.value;
    let projected = sonine_inner(ctx, pf, g)?.value;
    Ok((full - projected).norm())
}

/// Residuals of the Sonine property.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SonineReport {
    /// The stored inner residual (the function is zero on `(0, λ)` by
    /// construction).
    pub r1: f64,
    /// `sup |F_+g|` over the check grid on `(0, λ)`.
    pub r2: f64,
    pub norm: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Uniform check grid on `(0, λ)`, end points excluded.
pub fn inner_check_grid(lambda: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| lambda * (k as f64 + 0.5) / count as f64)
        .collect()
}

/// `r₁`, `r₂` and the verdict `max(r₁, r₂) ≤ tol·‖g‖`.
pub fn verify_sonine(ctx: &SonineContext, g: &SonineFunction, tol: f64) -> Result<SonineReport> {
    let grid = inner_check_grid(ctx.lambda(), 64);
    let mut r2: f64 = 0.0;
    for &x in &grid {
        r2 = r2.max(outer_transform(ctx, &g.outer, x)?.value.norm());
    }
    let norm = if g.outer.density.power.is_some() {
        f64::NAN
    } else {
        sonine_norm(ctx, g)?
    };
    let r1 = g.inner_residual;
    let pass = r1.max(r2) <= tol * norm || (norm == 0.0 && r1.max(r2) == 0.0);
    Ok(SonineReport {
        r1,
        r2,
        norm,
        tol,
        pass,
    })
}

/// `X_w`, the element of `K_λ` with `∫ f·t^{−w} = ∫ f·X_w` for `f ∈ K_λ`,
/// with its jump at `λ⁺`.
#[derive(Clone, Debug)]
pub struct Evaluator {
    pub w: c64,
    pub sonine: SonineFunction,
    pub jump: Estimate,
}

/// `X_w = π(1_{t>λ} t^{−w})`. With `b(y) = 2C(2πy, w)`,
/// `u_w = (1 − D)^{-1} b = b + s` where `s = (1 − D)^{-1} D b` is smooth;
/// `Db` on the nodes goes through the Mellin probe against the rows of the
/// folded sinc kernel.
pub fn evaluator(ctx: &SonineContext, w: c64) -> Result<Evaluator> {
    if !(w.re > 0.5) {
        return Err(Error::Domain("the evaluator needs Re w > 1/2"));
    }
    let lambda = ctx.lambda();
    let probe = MellinProbe::new(lambda, w)?;
    let s = smooth_part(ctx, &probe)?;
    // jump = λ^{−w} − F_+(u_w)(λ)
    let band = probe.apply_fn(|y| c64::new(2.0 * (2.0 * PI * lambda * y).cos(), 0.0));
    let smooth = cosine_transform_of_inner(&s, lambda);
    let point = (-w * lambda.ln()).exp();
    let jump = Estimate {
        value: point - band.value - smooth,
        err: band.err + 1e-15 * (point.norm() + smooth.norm()),
    };
    let sonine = SonineFunction {
        lambda,
        outer: OuterFunction {
            explicit: EvenFunction::PowerTail { cut: lambda, w },
            density: Density {
                smooth: s,
                power: Some(w),
            },
        },
        inner_residual: 0.0,
        source: String::from("evaluator"),
    };
    Ok(Evaluator { w, sonine, jump })
}

/// `s = (1 − D)^{-1} D b` for `b = 2C(2π·, w)`, on the nodes.
pub(crate) fn smooth_part(ctx: &SonineContext, probe: &MellinProbe) -> Result<InnerFunction> {
    let lambda = ctx.lambda();
    let mut db = Vec::with_capacity(ctx.n());
    let sinc = |u: f64| {
        let z = 2.0 * PI * lambda * u;
        if z.abs() < 1e-4 {
            2.0 * lambda * (1.0 - z * z / 6.0)
        } else {
            z.sin() / (PI * u)
        }
    };
    for &x in ctx.rule().nodes() {
        db.push(
            probe
                .apply_fn(|y| c64::new(sinc(x - y) + sinc(x + y), 0.0))
                .value,
        );
    }
    let db = InnerFunction::new(ctx.rule().clone(), db)?;
    Ok(ctx.one_minus_d()?.solve(&db).u)
}

impl Evaluator {
    /// The two sides of the reproducing identity for `g ∈ K_λ` with smooth
    /// density: `(∫_λ^∞ g·t^{−w}, ∫_λ^∞ g·X_w)`, bilinear.
    pub fn pair(&self, ctx: &SonineContext, g: &SonineFunction) -> Result<(c64, c64)> {
        if g.outer.density.power.is_some() {
            return Err(Error::Contract("pairing needs a smooth density"));
        }
        let lambda = ctx.lambda();
        let w = self.w;
        let probe = MellinProbe::new(lambda, w)?;
        let t_out = t_out_for(ctx, &g.outer.explicit)?;
        // ∫_λ^∞ f t^{−w}
        let power = EvenFunction::PowerTail {
            cut: lambda,
            w: w.conj(),
        };
        let direct = g.outer.explicit.inner_on(&power, lambda, t_out)?.value;
        // ∫_λ^∞ F_+β t^{−w} = ∫_0^λ β·2C(2π·, w) (bilinear)
        let beta = &g.outer.density.smooth;
        let mb = probe
            .effective_weights(ctx.rule())
            .apply(beta.values())
            .value;
        let lhs = direct - mb;
        // ∫_λ^∞ g F_+u = ∫_0^λ F_+g · u with u = b + s
        let mut fg = Vec::with_capacity(ctx.n());
        for &y in ctx.rule().nodes() {
            fg.push(outer_transform(ctx, &g.outer, y)?.value);
        }
        let fg = InnerFunction::new(ctx.rule().clone(), fg)?;
        let eff = probe.effective_weights(ctx.rule()).apply(fg.values()).value;
        let s = &self.sonine.outer.density.smooth;
        let smooth: c64 = fg
            .values()
            .iter()
            .zip(s.values())
            .zip(ctx.rule().weights())
            .map(|((a, b), w)| a * b * *w)
            .sum();
        Ok((lhs, lhs - eff - smooth))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_transforms_are_involutions() {
        for f in [
            EvenFunction::gaussian(2.0),
            EvenFunction::gauss_cos(0.7),
            EvenFunction::Hermite2 {
                a: c64::new(0.3, 0.1),
                b: c64::new(1.1, 0.0),
            },
        ] {
            let ff = f.closed_transform().unwrap().closed_transform().unwrap();
            for &t in &[0.0, 0.4, 1.7] {
                assert!((ff.value(t) - f.value(t)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn hermite_anti_is_anti_invariant() {
        let f = EvenFunction::hermite_anti();
        let g = f.closed_transform().unwrap();
        for &t in &[0.0, 0.3, 1.2] {
            assert!((g.value(t) + f.value(t)).norm() < 1e-15);
        }
    }

    #[test]
    fn tail_masses_bound_the_integrals() {
        let f = EvenFunction::gauss_cos(0.7);
        let g = f.closed_transform().unwrap();
        for h in [&f, &g, &EvenFunction::hermite_anti()] {
            let m = h.tail_mass(1.5).unwrap();
            let mut abs = |t: f64| c64::new(h.value(t).norm(), 0.0);
            let exact = adaptive(&mut abs, 1.5, 8.0, 1e-20, 1e-13).value.re;
            assert!(m >= exact * (1.0 - 1e-12));
        }
    }

    #[test]
    fn unit_gaussian_half_line_norm() {
        let n = EvenFunction::unit_gaussian().norm(6.0).unwrap();
        assert!((n - 0.5f64.sqrt()).abs() < 1e-13);
    }
}
