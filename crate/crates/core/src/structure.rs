//! The functions `ψ_±`, the distributions `A_λ` and `-iB_λ`, and the entire
//! functions `E_λ = A_λ - iB_λ` with their reproducing kernel.
//!
//! With `u_± = (1 ± F_λ)^{-1}(2cos 2πλ·)` on `(0, λ)`,
//!
//! * `ψ_+(x) = 2cos(2πλx) - F_+u_+(x)` and `ψ_-(x) = 2cos(2πλx) + F_+u_-(x)`;
//! * `A_λ = δ_λ + 2cos(2πλ·) - (1 + F_+)u_+`, whose restriction to `t > λ` is
//!   `ψ_+`;
//! * `-iB_λ = δ_λ - 2cos(2πλ·) + (1 - F_+)u_-`, whose restriction to `t > λ`
//!   is `-ψ_-`.
//!
//! Both vanish on `(0, λ)`. Completed Mellin transforms reduce to the tail
//! integral `C(2πλ, w)` plus the product-integration functional
//! `M(ρ, w) = ∫_λ^∞ F_+ρ·t^{-w}` of [`MellinProbe`].
//!
//! `E_λ(w)` is computed two ways: from the Mellin transform of
//! `ψ_+ - ψ_- = -F_+(u_+ + u_-)`, and as `√λ` times the jump at `λ` of the
//! evaluator `X_w`, completed by the Gamma factor.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // inherent f64 math is only visible when std is linked
use num_traits::Float;

use crate::c64;
use crate::context::SonineContext;
use crate::error::{Error, Result};
use crate::kernels::{cosine_transform_of_inner, InnerFunction};
use crate::mellin::{EffectiveWeights, MellinProbe};
use crate::numerics::{
    adaptive, cosine_power_tail, gamma_factor, gauss_legendre, Estimate, QuadratureRule,
};
use crate::projection::{evaluator, explicit_transform, t_out_for, EvenFunction, SonineFunction};

const ONE: c64 = c64::new(1.0, 0.0);
const I: c64 = c64::new(0.0, 1.0);

/// Nodes of the independent rule used to restrict `ψ_±` to `(0, λ)` when
/// checking the defining equation away from the Nyström nodes.
const CHECK_NODES: usize = 97;
/// Samples of the tail level beyond the truncation of line integrals.
const TAIL_SAMPLES: usize = 40;

fn two_cos(lambda: f64, x: f64) -> c64 {
    c64::new(2.0 * (2.0 * PI * lambda * x).cos(), 0.0)
}

/// The inner solutions `u_±` and the entire functions `ψ_±` they extend to.
#[derive(Clone, Debug)]
pub struct PsiPair {
    lambda: f64,
    u_plus: InnerFunction,
    u_minus: InnerFunction,
    residual_plus: f64,
    residual_minus: f64,
}

/// Solves `(1 ± F_λ)u_± = 2cos(2πλ·)` on the nodes.
pub fn compute_psi(ctx: &SonineContext) -> Result<PsiPair> {
    let lambda = ctx.lambda();
    let rhs = ctx.sample(|y| two_cos(lambda, y))?;
    let plus = ctx.resolvent(1.0)?.solve(&rhs);
    let minus = ctx.resolvent(-1.0)?.solve(&rhs);
    Ok(PsiPair {
        lambda,
        u_plus: plus.u,
        u_minus: minus.u,
        residual_plus: plus.residual,
        residual_minus: minus.residual,
    })
}

impl PsiPair {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn u_plus(&self) -> &InnerFunction {
        &self.u_plus
    }

    pub fn u_minus(&self) -> &InnerFunction {
        &self.u_minus
    }

    /// `u_+` for `sign = 1`, `u_-` for `sign = -1`.
    pub fn u(&self, sign: f64) -> &InnerFunction {
        if sign > 0.0 {
            &self.u_plus
        } else {
            &self.u_minus
        }
    }

    pub fn psi_plus(&self, x: f64) -> c64 {
        self.psi(1.0, x)
    }

    pub fn psi_minus(&self, x: f64) -> c64 {
        self.psi(-1.0, x)
    }

    /// `ψ_±(x) = 2cos(2πλx) ∓ F_+(u_±)(x)`, valid for every `x ≥ 0`.
    pub fn psi(&self, sign: f64, x: f64) -> c64 {
        two_cos(self.lambda, x) - cosine_transform_of_inner(self.u(sign), x) * sign
    }

    /// Relative residual `‖(1 ± F_λ)u_± - 2cos‖ / ‖2cos‖` of the solve.
    pub fn solve_residual(&self, sign: f64) -> f64 {
        if sign > 0.0 {
            self.residual_plus
        } else {
            self.residual_minus
        }
    }

    /// `max_i |ψ_±(x_i) - u_±(x_i)|` over the Nyström nodes, relative to
    /// `max |u_±|`.
    pub fn extension_defect(&self, sign: f64) -> f64 {
        let u = self.u(sign);
        let rule = u.rule();
        let worst = rule
            .nodes()
            .iter()
            .zip(u.values())
            .map(|(&x, v)| (self.psi(sign, x) - v).norm())
            .fold(0.0, f64::max);
        worst / u.sup().max(f64::MIN_POSITIVE)
    }

    /// Rule on `(0, λ)` unrelated to the Nyström nodes.
    pub fn check_rule(&self) -> Result<QuadratureRule> {
        gauss_legendre(CHECK_NODES, 0.0, self.lambda)
    }

    /// `|ψ(x) ± F_+(ψ|_{(0,λ)})(x) - 2cos(2πλx)|`, with the restriction
    /// evaluated through the extension formula on `check`.
    pub fn defining_residual(&self, sign: f64, x: f64, check: &QuadratureRule) -> f64 {
        let inner: c64 = check
            .nodes()
            .iter()
            .zip(check.weights())
            .map(|(&y, &w)| self.psi(sign, y) * (2.0 * (2.0 * PI * x * y).cos() * w))
            .sum();
        (self.psi(sign, x) + inner * sign - two_cos(self.lambda, x)).norm()
    }
}

/// `point_mass·δ_λ + cos_coef·2cos(2πλ·) - cos_coef·(1 + parity·F_+)ρ` on
/// the half-line, with `cos_coef = parity`.
///
/// Beyond `λ` this is the tail `cos_coef·2cos(2πλt) - F_+ρ(t)`; on `(0, λ)`
/// it vanishes because `(1 + parity·F_λ)ρ = 2cos(2πλ·)`.
#[derive(Clone, Debug)]
pub struct SonineDistribution {
    pub lambda: f64,
    pub point_mass: f64,
    pub cos_coef: f64,
    pub density: InnerFunction,
    /// `+1` when invariant under `F_+`, `-1` when anti-invariant.
    pub parity: f64,
}

/// `(A_λ, -iB_λ)`.
pub fn build_distributions(psi: &PsiPair) -> (SonineDistribution, SonineDistribution) {
    let make = |sign: f64| SonineDistribution {
        lambda: psi.lambda,
        point_mass: 1.0,
        cos_coef: sign,
        density: psi.u(sign).clone(),
        parity: sign,
    };
    (make(1.0), make(-1.0))
}

impl SonineDistribution {
    /// The function part at `t > λ`.
    pub fn tail(&self, t: f64) -> c64 {
        two_cos(self.lambda, t) * self.cos_coef - cosine_transform_of_inner(&self.density, t)
    }

    /// Sup over the nodes of the function part on `(0, λ)`, computed from
    /// the Nyström matrix.
    pub fn vanishing_residual(&self, ctx: &SonineContext) -> f64 {
        let f_rho = ctx.apply_f(&self.density);
        let s = c64::new(self.parity, 0.0);
        let rho = self.density.combine(ONE, &f_rho, s);
        ctx.rule()
            .nodes()
            .iter()
            .zip(rho.values())
            .map(|(&y, r)| (two_cos(self.lambda, y) - r).norm())
            .fold(0.0, f64::max)
    }

    /// `⟨D, φ⟩ = point_mass·φ(λ) + ∫_λ^∞ tail·φ` for an even test function.
    ///
    /// The density term is moved onto `(0, λ)`:
    /// `∫_λ^∞ F_+ρ·φ = ∫_0^λ ρ·F_+(1_{t>λ}φ)`.
    pub fn pair(&self, ctx: &SonineContext, phi: &EvenFunction) -> Result<Estimate> {
        let lambda = self.lambda;
        let t_out = t_out_for(ctx, phi)?;
        let mut total = Estimate::exact(phi.value(lambda) * self.point_mass);
        let mut osc = |t: f64| two_cos(lambda, t) * phi.value(t);
        let mut x = lambda;
        while x < t_out {
            let y = (x + 0.5).min(t_out);
            let part = adaptive(&mut osc, x, y, 1e-18, 1e-15);
            total.value += part.value * self.cos_coef;
            total.err += part.err;
            x = y;
        }
        total.err += 2.0
            * phi
                .tail_mass(t_out)
                .ok_or(Error::Contract("test function has no tail bound"))?;
        let rule = ctx.rule();
        for ((&y, &w), r) in rule
            .nodes()
            .iter()
            .zip(rule.weights())
            .zip(self.density.values())
        {
            let t = explicit_transform(ctx, phi, y)?;
            total.value -= t.value * r * w;
            total.err += t.err * r.norm() * w;
        }
        Ok(total)
    }

    /// `|⟨D, F_+φ⟩ - parity·⟨D, φ⟩|` and the scale `max(|⟨D, φ⟩|, |φ(λ)|)`.
    ///
    /// The point-mass term keeps the scale honest when the pairing itself
    /// vanishes, as it does for `-iB_λ` against a self-reciprocal `φ`.
    pub fn invariance_defect(&self, ctx: &SonineContext, phi: &EvenFunction) -> Result<(f64, f64)> {
        let fphi = phi.closed_transform().ok_or(Error::Contract(
            "test function needs a closed-form transform",
        ))?;
        let direct = self.pair(ctx, phi)?;
        let transformed = self.pair(ctx, &fphi)?;
        let scale = direct.value.norm().max(phi.value(self.lambda).norm());
        Ok((
            (transformed.value - direct.value * self.parity).norm(),
            scale,
        ))
    }
}

/// The Mellin data shared by everything evaluated at one `w`.
struct MellinAt {
    lambda: f64,
    weights: EffectiveWeights,
    gamma: c64,
    /// `λ^{-w}`.
    point: c64,
    /// `2C(2πλ, w)`.
    cos_tail: Estimate,
}

impl MellinAt {
    fn new(ctx: &SonineContext, w: c64) -> Result<Self> {
        if !(w.re > 0.0) {
            return Err(Error::Domain("completed Mellin transforms need Re w > 0"));
        }
        let lambda = ctx.lambda();
        let probe = MellinProbe::new(lambda, w)?;
        let c = cosine_power_tail(2.0 * PI * lambda, w, lambda)?;
        Ok(MellinAt {
            lambda,
            weights: probe.effective_weights(ctx.rule()),
            gamma: gamma_factor(w)?,
            point: (-w * lambda.ln()).exp(),
            cos_tail: Estimate {
                value: c.value * 2.0,
                err: c.err * 2.0,
            },
        })
    }

    /// `Γ_f(w)·(√λ/2)·[point_mass·λ^{-w} + cos_coef·2C(2πλ, w) - M(ρ, w)]`.
    fn distribution(&self, d: &SonineDistribution) -> Estimate {
        let m = self.weights.apply(d.density.values());
        let scale = self.gamma * (0.5 * self.lambda.sqrt());
        let inner = self.point * d.point_mass + self.cos_tail.value * d.cos_coef - m.value;
        Estimate {
            value: scale * inner,
            err: scale.norm() * (self.cos_tail.err + m.err + 4.0 * f64::EPSILON * inner.norm()),
        }
    }

    /// `Γ_f(w)·√λ·[λ^{-w} - M(u_+ + u_-, w)/2]`.
    fn mellin_tail_route(&self, psi: &PsiPair) -> Estimate {
        let sum = psi.u_plus.combine(ONE, &psi.u_minus, ONE);
        let m = self.weights.apply(sum.values());
        let scale = self.gamma * self.lambda.sqrt();
        let inner = self.point - m.value * 0.5;
        Estimate {
            value: scale * inner,
            err: scale.norm() * (0.5 * m.err + 4.0 * f64::EPSILON * inner.norm()),
        }
    }
}

/// Completed Mellin transform of a distribution, `Re w > 0`.
pub fn completed_mellin(ctx: &SonineContext, d: &SonineDistribution, w: c64) -> Result<Estimate> {
    Ok(MellinAt::new(ctx, w)?.distribution(d))
}

/// How `E` was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Mellin transform of `ψ_+ - ψ_-` beyond `λ`; needs `Re w > 0`.
    MellinTail,
    /// `√λ` times the jump of the evaluator at `λ`; needs `Re w > 1/2`.
    EvaluatorJump,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StructureEvaluation {
    pub w: c64,
    pub e: c64,
    pub a: c64,
    pub b: c64,
    pub method: Method,
    /// Error estimate for `e`.
    pub err: f64,
}

/// Both forms of `K(z_1, z_2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelValue {
    /// `(E(z_1)E(z_2) - E(1-z_1)E(1-z_2)) / (z_1 + z_2 - 1)`.
    pub product_form: c64,
    /// `2(-iB(z_1)A(z_2) + A(z_1)(-iB(z_2))) / (z_1 + z_2 - 1)`; the value
    /// returned as `K`.
    pub split_form: c64,
}

impl KernelValue {
    pub fn value(&self) -> c64 {
        self.split_form
    }

    /// `|product - split| / max(|product|, |split|)`.
    pub fn discrepancy(&self) -> f64 {
        let scale = self.product_form.norm().max(self.split_form.norm());
        if scale == 0.0 {
            0.0
        } else {
            (self.product_form - self.split_form).norm() / scale
        }
    }
}

/// `A`, `B` from the distributions and `E` from the `ψ` route at one `w`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MellinParts {
    pub e: Estimate,
    pub a: Estimate,
    /// Completed transform of `-iB_λ`, so that `B = i·minus_ib`.
    pub minus_ib: Estimate,
}

impl MellinParts {
    pub fn b(&self) -> c64 {
        I * self.minus_ib.value
    }

    /// `E(1 - w) = A(w) + iB(w)` by the parities of `A` and `B`.
    pub fn reflected(&self) -> Estimate {
        Estimate {
            value: self.a.value - self.minus_ib.value,
            err: self.a.err + self.minus_ib.err,
        }
    }
}

/// `ψ_±`, `A_λ`, `-iB_λ` on a context, with the entire functions built
/// from them.
#[derive(Clone, Debug)]
pub struct StructureFunctions<'a> {
    ctx: &'a SonineContext,
    psi: PsiPair,
    a: SonineDistribution,
    minus_ib: SonineDistribution,
}

impl<'a> StructureFunctions<'a> {
    pub fn new(ctx: &'a SonineContext) -> Result<Self> {
        let psi = compute_psi(ctx)?;
        let (a, minus_ib) = build_distributions(&psi);
        Ok(StructureFunctions {
            ctx,
            psi,
            a,
            minus_ib,
        })
    }

    pub fn context(&self) -> &SonineContext {
        self.ctx
    }

    pub fn psi(&self) -> &PsiPair {
        &self.psi
    }

    pub fn a_distribution(&self) -> &SonineDistribution {
        &self.a
    }

    pub fn minus_ib_distribution(&self) -> &SonineDistribution {
        &self.minus_ib
    }

    /// All three transforms from a single probe.
    pub fn parts(&self, w: c64) -> Result<MellinParts> {
        let at = MellinAt::new(self.ctx, w)?;
        Ok(MellinParts {
            e: at.mellin_tail_route(&self.psi),
            a: at.distribution(&self.a),
            minus_ib: at.distribution(&self.minus_ib),
        })
    }

    /// `E` from the Mellin transform of `ψ_+ - ψ_-`. Inside the strip
    /// `0 < Re w < 1`, `A` and `B` come from `E(w) ± E(1 - w)`; elsewhere
    /// from the distributions.
    pub fn e_mellin_tail(&self, w: c64) -> Result<StructureEvaluation> {
        if !(w.re > 0.0) {
            return Err(Error::Domain("E is computed only for Re w > 0"));
        }
        let parts = self.parts(w)?;
        let e = parts.e.value;
        let (a, b) = if w.re < 1.0 {
            let mirror = self.parts(ONE - w)?.e.value;
            ((e + mirror) * 0.5, I * (e - mirror) * 0.5)
        } else {
            (parts.a.value, parts.b())
        };
        Ok(StructureEvaluation {
            w,
            e,
            a,
            b,
            method: Method::MellinTail,
            err: parts.e.err,
        })
    }

    /// `E = √λ·Γ_f(w)·jump(X_w)`, with `A`, `B` from the distributions.
    pub fn e_evaluator_jump(&self, w: c64) -> Result<StructureEvaluation> {
        if !(w.re > 0.5) {
            return Err(Error::Domain("the evaluator route needs Re w > 1/2"));
        }
        let x = evaluator(self.ctx, w)?;
        let scale = gamma_factor(w)? * self.ctx.lambda().sqrt();
        let parts = self.parts(w)?;
        Ok(StructureEvaluation {
            w,
            e: scale * x.jump.value,
            a: parts.a.value,
            b: parts.b(),
            method: Method::EvaluatorJump,
            err: scale.norm() * x.jump.err,
        })
    }

    /// `(A(w), B(w))` from the distributions.
    pub fn a_b(&self, w: c64) -> Result<(Estimate, Estimate)> {
        let p = self.parts(w)?;
        Ok((
            p.a,
            Estimate {
                value: p.b(),
                err: p.minus_ib.err,
            },
        ))
    }

    /// `E(w)` by the `ψ` route.
    pub fn e(&self, w: c64) -> Result<Estimate> {
        Ok(self.parts(w)?.e)
    }

    /// `E(1 - w)`: directly when `Re(1 - w) > 0`, otherwise by parity from
    /// `A(w)` and `B(w)`.
    pub fn e_reflected(&self, w: c64) -> Result<Estimate> {
        let mirror = ONE - w;
        if mirror.re > 0.0 {
            self.e(mirror)
        } else {
            Ok(self.parts(w)?.reflected())
        }
    }

    /// Both forms of the reproducing kernel `K(z_1, z_2)`, from the
    /// `A`, `B` of [`Self::e_mellin_tail`] at each point with
    /// `E(z) = A - iB` and `E(1 - z) = A + iB`. Inside the strip these are
    /// the `ψ`-route values of `E` itself.
    pub fn kernel(&self, z1: c64, z2: c64) -> Result<KernelValue> {
        let denom = z1 + z2 - 1.0;
        if denom.norm() <= 1e-12 * (1.0 + z1.norm() + z2.norm()) {
            return Err(Error::Domain("K is singular on z1 + z2 = 1"));
        }
        let p1 = self.e_mellin_tail(z1)?;
        let p2 = self.e_mellin_tail(z2)?;
        let (e1, r1, m1) = (p1.a - I * p1.b, p1.a + I * p1.b, -I * p1.b);
        let (e2, r2, m2) = (p2.a - I * p2.b, p2.a + I * p2.b, -I * p2.b);
        let product_form = (e1 * e2 - r1 * r2) / denom;
        let split_form = (m1 * p2.a + p1.a * m2) * 2.0 / denom;
        Ok(KernelValue {
            product_form,
            split_form,
        })
    }

    /// `Γ_f(w)·∫_λ^∞ f t^{-w}` for a Sonine function with smooth density.
    pub fn completed_transform(&self, f: &SonineFunction, w: c64) -> Result<Estimate> {
        let at = MellinAt::new(self.ctx, w)?;
        self.transform_with(&at, f, w)
    }

    fn transform_with(&self, at: &MellinAt, f: &SonineFunction, w: c64) -> Result<Estimate> {
        if f.outer.density.power.is_some() {
            return Err(Error::Contract(
                "completed transforms need a smooth density",
            ));
        }
        let explicit = explicit_mellin(self.ctx, &f.outer.explicit, w)?;
        let m = at.weights.apply(f.density().values());
        let inner = explicit.value - m.value;
        Ok(Estimate {
            value: at.gamma * inner,
            err: at.gamma.norm() * (explicit.err + m.err + 4.0 * f64::EPSILON * inner.norm()),
        })
    }

    /// Samples of `|E(w)|` against `|E(1 - w)|`.
    pub fn de_branges(&self, grid: &[c64]) -> Result<DeBrangesReport> {
        let mut margin = f64::INFINITY;
        let mut worst = c64::new(0.0, 0.0);
        for &w in grid {
            let e = self.e(w)?.value.norm();
            let r = self.e_reflected(w)?.value.norm();
            let m = (e - r) / e;
            if m < margin || m.is_nan() {
                margin = m;
                worst = w;
            }
        }
        Ok(DeBrangesReport {
            samples: grid.len(),
            margin,
            worst,
        })
    }

    /// `(|A(w) - A(1-w)|, |B(w) + B(1-w)|)` relative to `max(|A(w)|, |B(w)|)`.
    pub fn symmetry_defect(&self, w: c64) -> Result<(f64, f64)> {
        let (a, b) = self.a_b(w)?;
        let (am, bm) = self.a_b(ONE - w)?;
        let scale = a.value.norm().max(b.value.norm());
        Ok((
            (a.value - am.value).norm() / scale,
            (b.value + bm.value).norm() / scale,
        ))
    }

    /// `A` and `B` along `1/2 + iτ`.
    pub fn critical_line(&self, taus: &[f64]) -> Result<CriticalLine> {
        let mut a = Vec::with_capacity(taus.len());
        let mut b = Vec::with_capacity(taus.len());
        for &t in taus {
            let (ea, eb) = self.a_b(c64::new(0.5, t))?;
            a.push(ea.value);
            b.push(eb.value);
        }
        Ok(CriticalLine {
            taus: taus.to_vec(),
            a,
            b,
        })
    }

    /// `(1/2π)∫_{-T}^{T} |F/E|²` on the critical line for each function,
    /// sharing the evaluations of `E`.
    ///
    /// The integrand is even in `t` for real `f`, so `[0, T]` is integrated
    /// with 16-point Gauss panels of width `panel` and doubled. A jump of `f`
    /// at `λ` makes `|F/E|²` decay like `1/t²` with an oscillating
    /// coefficient; the remainder is `c/(πT)` with `c` the mean of
    /// `t²|F/E|²` over equispaced samples of `[T, 3T]`.
    pub fn line_norms(
        &self,
        fs: &[SonineFunction],
        t_max: f64,
        panel: f64,
    ) -> Result<Vec<LineNorm>> {
        if !(t_max > 0.0) || !(panel > 0.0) {
            return Err(Error::InvalidArgument(
                "line integral needs positive T and panel",
            ));
        }
        let rule = gauss_legendre(16, 0.0, 1.0)?;
        let panels = (t_max / panel).ceil() as usize;
        let h = t_max / panels as f64;
        let mut sums = alloc::vec![0.0; fs.len()];
        for p in 0..panels {
            for (&s, &ws) in rule.nodes().iter().zip(rule.weights()) {
                let t = h * (p as f64 + s);
                for (k, g) in self.line_integrands(fs, t)?.into_iter().enumerate() {
                    sums[k] += g * ws * h;
                }
            }
        }
        let mut level = alloc::vec![0.0; fs.len()];
        for j in 0..=TAIL_SAMPLES {
            let t = t_max * (1.0 + 2.0 * j as f64 / TAIL_SAMPLES as f64);
            for (k, g) in self.line_integrands(fs, t)?.into_iter().enumerate() {
                level[k] += t * t * g / (TAIL_SAMPLES + 1) as f64;
            }
        }
        Ok(sums
            .iter()
            .zip(&level)
            .map(|(&s, &c)| LineNorm {
                value: s / PI,
                remainder: c / (PI * t_max),
            })
            .collect())
    }

    /// `|F(1/2 + it)/E(1/2 + it)|²` for each function.
    fn line_integrands(&self, fs: &[SonineFunction], t: f64) -> Result<Vec<f64>> {
        let w = c64::new(0.5, t);
        let at = MellinAt::new(self.ctx, w)?;
        let e2 = at.mellin_tail_route(&self.psi).value.norm_sqr();
        fs.iter()
            .map(|f| Ok(self.transform_with(&at, f, w)?.value.norm_sqr() / e2))
            .collect()
    }

    /// `(1/2π)∫_{-T}^{T} F(s)·conj K(z_1, s) / |E(s)|² dt` on `s = 1/2 + it`
    /// for real `z_1`, together with `F(z_1)`.
    pub fn reproducing_pairing(
        &self,
        f: &SonineFunction,
        z1: f64,
        t_max: f64,
        panel: f64,
    ) -> Result<(f64, f64)> {
        let z = c64::new(z1, 0.0);
        let ez = self.e(z)?.value;
        let rz = self.e_reflected(z)?.value;
        let rule = gauss_legendre(16, 0.0, 1.0)?;
        let panels = (t_max / panel).ceil() as usize;
        let h = t_max / panels as f64;
        let mut sum = 0.0;
        for p in 0..panels {
            for (&s, &ws) in rule.nodes().iter().zip(rule.weights()) {
                let t = h * (p as f64 + s);
                let w = c64::new(0.5, t);
                let at = MellinAt::new(self.ctx, w)?;
                let e = at.mellin_tail_route(&self.psi).value;
                let mirror = self.e(ONE - w)?.value;
                let k = (ez * e - rz * mirror) / (z + w - 1.0);
                let g = self.transform_with(&at, f, w)?.value * k.conj() / e.norm_sqr();
                // the values at -t are the conjugates
                sum += g.re * ws * h;
            }
        }
        Ok((sum / PI, self.completed_transform(f, z)?.value.re))
    }
}

/// `∫_λ^∞ e(t)t^{-w} dt` for an explicit even function, by adaptive panels
/// up to the truncation point and the `L¹` tail bound beyond it.
fn explicit_mellin(ctx: &SonineContext, e: &EvenFunction, w: c64) -> Result<Estimate> {
    if e.is_zero() {
        return Ok(Estimate::ZERO);
    }
    let lambda = ctx.lambda();
    let t_out = t_out_for(ctx, e)?;
    let mut g = |t: f64| e.value(t) * (-w * t.ln()).exp();
    let mut total = Estimate::ZERO;
    let mut x = lambda;
    while x < t_out {
        let y = (x + 0.5).min(t_out);
        total += adaptive(&mut g, x, y, 1e-18, 1e-15);
        x = y;
    }
    let tail = e
        .tail_mass(t_out)
        .ok_or(Error::Contract("no tail bound at the truncation point"))?;
    total.err += tail * t_out.powf(-w.re);
    Ok(total)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeBrangesReport {
    pub samples: usize,
    /// `min (|E(w)| - |E(1-w)|) / |E(w)|` over the grid.
    pub margin: f64,
    pub worst: c64,
}

/// `Re w ∈ {0.6, 1, 2, 3}`, `Im w ∈ [-20, 20]` in steps of `1/2`.
pub fn de_branges_grid() -> Vec<c64> {
    let mut grid = Vec::new();
    for &re in &[0.6, 1.0, 2.0, 3.0] {
        for k in -40..=40 {
            grid.push(c64::new(re, 0.5 * k as f64));
        }
    }
    grid
}

/// Samples of `A` and `B` on the critical line.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalLine {
    pub taus: Vec<f64>,
    pub a: Vec<c64>,
    pub b: Vec<c64>,
}

impl CriticalLine {
    /// `max |Im A|` and `max |Im B|`, each relative to `|E| = (|A|² + |B|²)^{1/2}`
    /// at the same sample (both are real there, so neither can serve as its
    /// own scale near its zeros).
    pub fn imaginary_defects(&self) -> (f64, f64) {
        let mut da: f64 = 0.0;
        let mut db: f64 = 0.0;
        for (a, b) in self.a.iter().zip(&self.b) {
            let scale = (a.norm_sqr() + b.norm_sqr()).sqrt();
            da = da.max(a.im.abs() / scale);
            db = db.max(b.im.abs() / scale);
        }
        (da, db)
    }

    /// Zeros of `Re A` located by sign changes and linear interpolation.
    pub fn zeros_a(&self) -> Vec<f64> {
        sign_changes(&self.taus, self.a.iter().map(|z| z.re))
    }

    /// Zeros of `Re B`. `B` is odd along the line, `B(1/2 - iτ) = -B(1/2 + iτ)`,
    /// so a grid starting at `τ = 0` sees the sign change there.
    pub fn zeros_b(&self) -> Vec<f64> {
        let mut out = Vec::new();
        if self.taus.first() == Some(&0.0) {
            out.push(0.0);
        }
        out.extend(sign_changes(&self.taus, self.b.iter().map(|z| z.re)));
        out
    }

    /// Whether the zeros of `A` and `B` strictly alternate.
    pub fn interlaced(&self) -> bool {
        let mut all: Vec<(f64, bool)> = self
            .zeros_a()
            .into_iter()
            .map(|t| (t, true))
            .chain(self.zeros_b().into_iter().map(|t| (t, false)))
            .collect();
        all.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(core::cmp::Ordering::Equal));
        all.windows(2).all(|p| p[0].1 != p[1].1 && p[0].0 < p[1].0)
    }
}

fn sign_changes(taus: &[f64], values: impl Iterator<Item = f64>) -> Vec<f64> {
    let v: Vec<f64> = values.collect();
    let mut out = Vec::new();
    for k in 1..v.len() {
        let (a, b) = (v[k - 1], v[k]);
        if a != 0.0 && (a < 0.0) != (b < 0.0) {
            let (ta, tb) = (taus[k - 1], taus[k]);
            out.push(ta + (tb - ta) * a / (a - b));
        }
    }
    out
}

/// `(1/2π)∫_{|t|≤T} |F/E|²` and an estimate of what lies beyond `|t| = T`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineNorm {
    pub value: f64,
    pub remainder: f64,
}
