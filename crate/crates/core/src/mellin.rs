//! Product-integration weights for the Mellin functional
//! `M(v, w) = ∫_0^λ v(y) · 2C(2πy, w) dy`, with
//! `C(a, w) = ∫_λ^∞ t^{-w} cos(at) dt` and `v` smooth on `[0, λ]`.
//!
//! `C(2πy, w)` behaves like `σ(w)(2πy)^{w-1}` at the origin, so plain
//! Gauss–Legendre sums converge slowly. The integral is split at
//! `y_c = min(λ/4, 1/(4λ))`:
//!
//! * on `(0, y_c)`, `C = σ a^{w-1} + R(a, w)` with `R` entire. The `R` part
//!   uses Gauss–Legendre; the power part integrates a shifted-Legendre
//!   expansion of `v(y_c s)` exactly through
//!   `∫_0^1 s^β P̃_k(s) ds = Π_{j<k}(β − j) / Π_{j≤k+1, j≥1}(β + j)`;
//! * on `[y_c, λ]`, composite 16-point Gauss panels, graded geometrically and
//!   short enough to resolve both `cos(2πλy)` and `y^{-i Im w}`, with `C` from
//!   [`cosine_power_tail`].
//!
//! Near odd integers the split has cancelling poles; there the functional is
//! replaced by its mean over a small circle, which agrees with the centre
//! value to `O(r⁸)` because `M` is analytic in `w`.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // inherent f64 math is only visible when std is linked
use num_traits::Float;

use crate::c64;
use crate::error::{Error, Result};
use crate::numerics::{
    cosine_power_series, cosine_power_tail, gauss_legendre, odd_integer_distance,
    singular_coefficient, Estimate, QuadratureRule,
};

/// Points (and Legendre degree) used on `(0, y_c)`.
const NEAR_POINTS: usize = 28;
/// Radius and switch-on distance of the circle average.
const CIRCLE_RADIUS: f64 = 2e-3;
const CIRCLE_TRIGGER: f64 = 1e-3;
const CIRCLE_POINTS: usize = 8;
/// Maximal phase (radians) across one outer panel.
const PANEL_PHASE: f64 = 4.0;

const GL16_NODES: usize = 16;

/// `M(·, w)` as a weighted sum over probe abscissae in `(0, λ)`.
#[derive(Clone, Debug)]
pub struct MellinProbe {
    lambda: f64,
    w: c64,
    nodes: Vec<f64>,
    weights: Vec<c64>,
    /// Error contributed per unit `|v|` at each node.
    err: Vec<f64>,
    /// The last two retained terms of the Legendre expansion near the
    /// origin, as functionals of `v`; their size bounds the truncation.
    trunc: [Vec<c64>; 2],
}

impl MellinProbe {
    /// Weights for test functions whose frequency is at most that of
    /// `cos(2πλy)`.
    pub fn new(lambda: f64, w: c64) -> Result<Self> {
        Self::with_bandwidth(lambda, w, lambda)
    }

    /// Weights for test functions oscillating no faster than `cos(2πΩy)`.
    pub fn with_bandwidth(lambda: f64, w: c64, omega: f64) -> Result<Self> {
        if !(omega >= 0.0) || !omega.is_finite() {
            return Err(Error::InvalidArgument(
                "bandwidth must be finite and non-negative",
            ));
        }
        let omega = omega.max(lambda);
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidArgument("λ must be positive and finite"));
        }
        if !crate::numerics::is_finite(w) {
            return Err(Error::InvalidArgument("w must be finite"));
        }
        if w.re <= 0.0 {
            return Err(Error::Domain("the Mellin functional needs Re w > 0"));
        }
        if odd_integer_distance(w) >= CIRCLE_TRIGGER {
            return Self::direct(lambda, w, omega);
        }
        let mut probe = MellinProbe {
            lambda,
            w,
            nodes: Vec::new(),
            weights: Vec::new(),
            err: Vec::new(),
            trunc: [Vec::new(), Vec::new()],
        };
        let share = 1.0 / CIRCLE_POINTS as f64;
        for k in 0..CIRCLE_POINTS {
            // offset by half a step so no sample sits on the real axis
            let theta = 2.0 * PI * (k as f64 + 0.5) * share;
            let wk = w + c64::from_polar(CIRCLE_RADIUS, theta);
            let part = Self::direct(lambda, wk, omega)?;
            probe.nodes.extend_from_slice(&part.nodes);
            probe.weights.extend(part.weights.iter().map(|c| c * share));
            probe.err.extend(part.err.iter().map(|e| e * share));
            for (t, pt) in probe.trunc.iter_mut().zip(&part.trunc) {
                t.extend(pt.iter().map(|c| c * share));
            }
        }
        // the mean-value remainder, bounded by the eighth Taylor term
        let remainder = (CIRCLE_RADIUS / 0.5).powi(CIRCLE_POINTS as i32);
        for (e, c) in probe.err.iter_mut().zip(&probe.weights) {
            *e += remainder * c.norm();
        }
        Ok(probe)
    }

    fn direct(lambda: f64, w: c64, omega: f64) -> Result<Self> {
        let y_c = (0.25 * lambda).min(0.25 / omega);
        let near = gauss_legendre(NEAR_POINTS, 0.0, 1.0)?;
        let beta = w - 1.0;

        // ∫_0^1 s^β P̃_k(s) ds, k < NEAR_POINTS
        let mut moments = Vec::with_capacity(NEAR_POINTS);
        let mut m = (beta + 1.0).inv();
        for k in 0..NEAR_POINTS {
            moments.push(m);
            let kf = k as f64;
            m = m * (beta - kf) / (beta + kf + 2.0);
        }
        let sigma = singular_coefficient(w)?;
        // 2σ (2π)^{w-1} y_c^{w}
        let front = sigma * 2.0 * (beta * (2.0 * PI).ln() + w * y_c.ln()).exp();

        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut err = Vec::new();
        let mut trunc = [Vec::new(), Vec::new()];
        for (&s, &ws) in near.nodes().iter().zip(near.weights()) {
            let legendre = shifted_legendre(NEAR_POINTS, s);
            let mut sing = c64::new(0.0, 0.0);
            for (k, (p, mk)) in legendre.iter().zip(&moments).enumerate() {
                sing += mk * ((2 * k + 1) as f64 * p);
            }
            let y = y_c * s;
            let regular = cosine_power_series(2.0 * PI * y, w, lambda) * 2.0;
            let weight = front * sing * ws + regular * (ws * y_c);
            nodes.push(y);
            weights.push(weight);
            for (slot, k) in trunc.iter_mut().zip([NEAR_POINTS - 2, NEAR_POINTS - 1]) {
                slot.push(front * moments[k] * ((2 * k + 1) as f64 * legendre[k] * ws));
            }
            err.push(ws * 1e-15 * (front.norm() + regular.norm() * y_c));
        }

        let gl = gauss_legendre(GL16_NODES, 0.0, 1.0)?;
        for (a, b) in outer_panels(lambda, omega, w, y_c) {
            for (&s, &ws) in gl.nodes().iter().zip(gl.weights()) {
                let y = a + (b - a) * s;
                let c = cosine_power_tail(2.0 * PI * y, w, lambda)?;
                let h = ws * (b - a) * 2.0;
                nodes.push(y);
                weights.push(c.value * h);
                err.push(c.err * h);
                for slot in trunc.iter_mut() {
                    slot.push(c64::new(0.0, 0.0));
                }
            }
        }
        Ok(MellinProbe {
            lambda,
            w,
            nodes,
            weights,
            err,
            trunc,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn w(&self) -> c64 {
        self.w
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[c64] {
        &self.weights
    }

    /// `M(v, w)` for `v` evaluable anywhere on `[0, λ]`.
    pub fn apply_fn(&self, mut v: impl FnMut(f64) -> c64) -> Estimate {
        let mut total = Estimate::ZERO;
        let (mut t0, mut t1) = (c64::new(0.0, 0.0), c64::new(0.0, 0.0));
        for (k, ((&y, c), e)) in self
            .nodes
            .iter()
            .zip(&self.weights)
            .zip(&self.err)
            .enumerate()
        {
            let vy = v(y);
            total.value += c * vy;
            total.err += e * vy.norm();
            t0 += self.trunc[0][k] * vy;
            t1 += self.trunc[1][k] * vy;
        }
        total.err += t0.norm() + t1.norm();
        total
    }

    /// Weights `ω̃_j` such that `M(v, w) ≈ Σ_j ω̃_j v(x_j)` when `v` is the
    /// polynomial interpolant of its samples at the nodes of `rule`.
    pub fn effective_weights(&self, rule: &QuadratureRule) -> EffectiveWeights {
        let n = rule.len();
        let mut weights = alloc::vec![c64::new(0.0, 0.0); n];
        let mut err = alloc::vec![0.0; n];
        let mut trunc = [weights.clone(), weights.clone()];
        for (k, ((&y, c), e)) in self
            .nodes
            .iter()
            .zip(&self.weights)
            .zip(&self.err)
            .enumerate()
        {
            let row = rule.interpolation_row(y);
            let (t0, t1) = (self.trunc[0][k], self.trunc[1][k]);
            for (j, l) in row.iter().enumerate() {
                weights[j] += c * *l;
                err[j] += e * l.abs();
                trunc[0][j] += t0 * *l;
                trunc[1][j] += t1 * *l;
            }
        }
        EffectiveWeights {
            weights,
            err,
            trunc,
        }
    }
}

/// Per-node weights of `M(·, w)` on a base rule.
#[derive(Clone, Debug)]
pub struct EffectiveWeights {
    pub weights: Vec<c64>,
    pub err: Vec<f64>,
    trunc: [Vec<c64>; 2],
}

impl EffectiveWeights {
    pub fn apply(&self, v: &[c64]) -> Estimate {
        assert_eq!(v.len(), self.weights.len(), "one sample per node");
        let mut total = Estimate::ZERO;
        let (mut t0, mut t1) = (c64::new(0.0, 0.0), c64::new(0.0, 0.0));
        for (j, ((c, e), x)) in self.weights.iter().zip(&self.err).zip(v).enumerate() {
            total.value += c * x;
            total.err += e * x.norm();
            t0 += self.trunc[0][j] * x;
            t1 += self.trunc[1][j] * x;
        }
        total.err += t0.norm() + t1.norm();
        total
    }
}

/// `P̃_k(s) = P_k(2s − 1)` for `k < count`.
fn shifted_legendre(count: usize, s: f64) -> Vec<f64> {
    let x = 2.0 * s - 1.0;
    let mut out = Vec::with_capacity(count);
    let (mut p0, mut p1) = (1.0, x);
    out.push(p0);
    if count > 1 {
        out.push(p1);
    }
    for k in 1..count.saturating_sub(1) {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        out.push(p2);
        p0 = p1;
        p1 = p2;
    }
    out
}

/// Panels covering `[y_c, λ]`: consecutive end points differ by a factor of
/// at most 2 and by a phase of at most [`PANEL_PHASE`] in both `2πΩy` and
/// `Im w · ln y`.
fn outer_panels(lambda: f64, omega: f64, w: c64, y_c: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let v = w.im.abs().max(1e-300);
    let max_ratio = 2.0f64.min((PANEL_PHASE / v).exp());
    let max_len = PANEL_PHASE / (2.0 * PI * omega);
    let mut a = y_c;
    while a < lambda * (1.0 - 1e-15) {
        let b = (a * max_ratio).min(a + max_len).min(lambda);
        out.push((a, b));
        a = b;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Oracle: adaptive quadrature of `v(y)·2C(2πy, w)` only away from the
    /// origin plus the series split near it, on a very fine composite rule.
    fn brute(lambda: f64, w: c64, v: impl Fn(f64) -> c64) -> c64 {
        // substitution y = y_c·s^k flattens the y^{w-1} singularity
        let k = 6.0;
        let upper = lambda;
        let rule = gauss_legendre(400, 0.0, 1.0).unwrap();
        let mut total = c64::new(0.0, 0.0);
        for (&s, &ws) in rule.nodes().iter().zip(rule.weights()) {
            let y = upper * s.powf(k);
            let jac = upper * k * s.powf(k - 1.0);
            let c = cosine_power_tail(2.0 * PI * y, w, lambda).unwrap().value;
            total += v(y) * c * 2.0 * jac * ws;
        }
        total
    }

    #[test]
    fn matches_substitution_oracle() {
        for &(lambda, w) in &[
            (1.0, c64::new(0.75, 0.0)),
            (1.0, c64::new(0.6, 3.0)),
            (0.5, c64::new(1.5, -1.0)),
            (2.0, c64::new(2.5, 0.0)),
        ] {
            let v = |y: f64| c64::new((2.0 * PI * lambda * y).cos() * 2.0, 0.0);
            let probe = MellinProbe::new(lambda, w).unwrap();
            let got = probe.apply_fn(v);
            let want = brute(lambda, w, v);
            assert!(
                (got.value - want).norm() < 1e-9 * want.norm(),
                "{lambda} {w}: {} {}",
                got.value,
                want
            );
        }
    }

    #[test]
    fn circle_average_is_continuous_across_odd_integers() {
        let v = |y: f64| c64::new(1.0 + y * y, 0.0);
        let at = MellinProbe::new(1.0, c64::new(3.0, 0.0))
            .unwrap()
            .apply_fn(v)
            .value;
        let off = MellinProbe::new(1.0, c64::new(3.0 + 2e-3, 0.0))
            .unwrap()
            .apply_fn(v)
            .value;
        let off2 = MellinProbe::new(1.0, c64::new(3.0 - 2e-3, 0.0))
            .unwrap()
            .apply_fn(v)
            .value;
        let mid = (off + off2) * 0.5;
        assert!((at - mid).norm() < 1e-6 * at.norm());
    }

    #[test]
    fn effective_weights_match_direct_application() {
        let lambda = 1.0;
        let w = c64::new(0.8, 2.0);
        let rule = gauss_legendre(120, 0.0, lambda).unwrap();
        let probe = MellinProbe::new(lambda, w).unwrap();
        let f = |y: f64| c64::new((3.0 * y).cos(), y);
        let samples: Vec<c64> = rule.nodes().iter().map(|&y| f(y)).collect();
        let a = probe.effective_weights(&rule).apply(&samples).value;
        let b = probe.apply_fn(f).value;
        assert!((a - b).norm() < 1e-12 * b.norm());
    }

    #[test]
    fn wide_band_test_functions() {
        let lambda = 1.0;
        let w = c64::new(0.8, 1.0);
        let t = 3.7;
        let v = |y: f64| c64::new(2.0 * (2.0 * PI * t * y).cos(), 0.0);
        let probe = MellinProbe::with_bandwidth(lambda, w, t).unwrap();
        let want = brute(lambda, w, v);
        assert!((probe.apply_fn(v).value - want).norm() < 1e-9 * want.norm());
    }

    #[test]
    fn rejects_left_half_plane() {
        assert!(matches!(
            MellinProbe::new(1.0, c64::new(-0.1, 0.0)),
            Err(Error::Domain(_))
        ));
    }
}
