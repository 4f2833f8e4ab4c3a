use core::f64::consts::PI;
#[allow(unused_imports)] // inherent f64 math is only visible when std is linked
use num_traits::Float;

use super::gamma::{ln_cos, log_gamma};
use super::integrate::{adaptive, Estimate};
use crate::c64;
use crate::error::{Error, Result};

/// Phase budget (radians) of one quadrature panel.
const PANEL_PHASE: f64 = 8.0;
/// The rotated integrand is dropped once `e^{-as/2}` falls below `e^{-40}`.
const DECAY_CUTOFF: f64 = 80.0;

/// `C(a, w) = ∫_λ^∞ t^{-w} cos(at) dt`.
///
/// For `a > 0` the integral is taken along the real axis up to
/// `T = max(λ, 2|Im w|/a)` and then rotated, `t = T ± is`, onto two
/// exponentially damped integrals
/// `½[i e^{iaT} ∫_0^∞ (T+is)^{-w} e^{-as} ds − i e^{-iaT} ∫_0^∞ (T−is)^{-w} e^{-as} ds]`.
/// Starting the rotation past the stationary point of `t^{-i Im w} e^{±iat}`
/// keeps `|e^{|Im w| arg(T ± is)} e^{-as}|` monotone, so the rotated pieces
/// carry no cancellation. With `|Im w| ≤ aλ/2` this is the plain rotation at
/// `T = λ`.
///
/// `a = 0` uses the closed form `λ^{1-w}/(w-1)` and needs `Re w > 1`.
pub fn cosine_power_tail(a: f64, w: c64, lambda: f64) -> Result<Estimate> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidArgument("λ must be positive and finite"));
    }
    if !(a >= 0.0) || !a.is_finite() {
        return Err(Error::InvalidArgument(
            "frequency must be finite and non-negative",
        ));
    }
    if !super::is_finite(w) {
        return Err(Error::InvalidArgument("w must be finite"));
    }
    if a == 0.0 {
        if w.re <= 1.0 {
            return Err(Error::Domain("C(0, w) diverges unless Re w > 1"));
        }
        let value = (-(w - 1.0) * lambda.ln()).exp() / (w - 1.0);
        return Ok(Estimate {
            value,
            err: 4.0 * f64::EPSILON * value.norm(),
        });
    }
    if w.re <= 0.0 {
        return Err(Error::Domain("C(a, w) needs Re w > 0"));
    }

    let v = w.im.abs();
    let t_rot = lambda.max(2.0 * v / a);
    // magnitude of the end-point contribution, used to scale tolerances
    let scale = lambda.powf(-w.re) * (1.0 / a).min(lambda.max(1.0 / a));
    let abs_tol = 1e-16 * scale;

    let mut total = Estimate::ZERO;
    let mut mass = 0.0;
    let mut on_axis = |t: f64| (-w * t.ln()).exp() * (a * t).cos();
    let mut t = lambda;
    while t < t_rot {
        let len = t.min(PANEL_PHASE / (a + v / t));
        let next = (t + len).min(t_rot);
        let piece = adaptive(&mut on_axis, t, next, abs_tol, 1e-15);
        mass += piece.value.norm();
        total += piece;
        t = next;
    }

    let rotated = rotated_tail(a, w, t_rot, abs_tol);
    mass += rotated.1;
    total += rotated.0;
    total.err += 8.0 * f64::EPSILON * mass;
    Ok(total)
}

/// The two rotated integrals starting at `T`, returned with the summed
/// magnitude of the panel contributions.
fn rotated_tail(a: f64, w: c64, t0: f64, abs_tol: f64) -> (Estimate, f64) {
    let i = c64::new(0.0, 1.0);
    let up = i * c64::from_polar(0.5, a * t0);
    let down = -i * c64::from_polar(0.5, -a * t0);
    let mut integrand = |s: f64| {
        let ln_r = 0.5 * (t0 * t0 + s * s).ln();
        let theta = s.atan2(t0);
        let plus = (-w * c64::new(ln_r, theta)).exp();
        let minus = (-w * c64::new(ln_r, -theta)).exp();
        (up * plus + down * minus) * (-a * s).exp()
    };
    let wn = w.norm().max(1e-300);
    let h0 = 0.5 * t0.min(1.0 / a);
    let s_max = DECAY_CUTOFF / a;
    let mut s = 0.0;
    let mut total = Estimate::ZERO;
    let mut mass = 0.0;
    while s < s_max {
        // arg(T + is) changes at rate T/(T² + s²)
        let phase_len = 6.0 * (t0 * t0 + s * s) / (t0 * wn);
        let len = s.max(h0).min(PANEL_PHASE / a).min(phase_len);
        let next = (s + len).min(s_max);
        let piece = adaptive(&mut integrand, s, next, abs_tol, 1e-15);
        mass += piece.value.norm();
        total += piece;
        s = next;
    }
    (total, mass)
}

/// `σ(w) = π / (2 Γ(w) cos(πw/2))`, the coefficient of `a^{w-1}` in the
/// small-frequency expansion of [`cosine_power_tail`]:
/// `C(a, w) = σ(w) a^{w-1} + R(a, w)` with `R` entire in `a`.
///
/// Fails at odd integers, where `σ` and one term of `R` have cancelling
/// poles.
pub fn singular_coefficient(w: c64) -> Result<c64> {
    let lc = ln_cos(w * (PI * 0.5));
    if !lc.re.is_finite() {
        return Err(Error::Pole);
    }
    Ok(((PI * 0.5).ln() - log_gamma(w)? - lc).exp())
}

/// The entire part `R(a, w) = -Σ_k (-1)^k a^{2k} λ^{2k+1-w} / ((2k)! (2k+1-w))`.
pub(crate) fn cosine_power_series(a: f64, w: c64, lambda: f64) -> c64 {
    let x2 = (a * lambda) * (a * lambda);
    let mut term = 1.0; // (-1)^k (aλ)^{2k} / (2k)!
    let mut acc = c64::new(0.0, 0.0);
    let mut k = 0usize;
    loop {
        let denom = c64::new(2.0 * k as f64 + 1.0, 0.0) - w;
        let contrib = denom.inv() * term;
        acc += contrib;
        if k > 2 && contrib.norm() <= 1e-18 * acc.norm() {
            break;
        }
        if k > 400 {
            break;
        }
        k += 1;
        let kf = k as f64;
        term *= -x2 / ((2.0 * kf - 1.0) * (2.0 * kf));
    }
    -(-(w - 1.0) * lambda.ln()).exp() * acc
}

/// Distance from `w` to the nearest positive odd integer.
pub(crate) fn odd_integer_distance(w: c64) -> f64 {
    let k = ((w.re - 1.0) * 0.5).round().max(0.0);
    (w - c64::new(2.0 * k + 1.0, 0.0)).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_frequency_closed_form() {
        let c = cosine_power_tail(0.0, c64::new(2.0, 0.0), 1.0).unwrap();
        assert!((c.value - c64::new(1.0, 0.0)).norm() < 1e-15);
        let c = cosine_power_tail(0.0, c64::new(3.0, 0.0), 2.0).unwrap();
        assert!((c.value - c64::new(0.125, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(
            cosine_power_tail(0.0, c64::new(1.0, 2.0), 1.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            cosine_power_tail(1.0, c64::new(0.0, 2.0), 1.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            cosine_power_tail(1.0, c64::new(-0.5, 0.0), 1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn conjugation_symmetry() {
        for &(a, w) in &[(0.5, c64::new(0.7, 4.0)), (6.0, c64::new(1.3, -11.0))] {
            let c = cosine_power_tail(a, w, 1.0).unwrap().value;
            let cc = cosine_power_tail(a, w.conj(), 1.0).unwrap().value;
            assert!((c.conj() - cc).norm() <= 1e-13 * c.norm());
        }
    }

    #[test]
    fn series_split_matches_quadrature() {
        // C(a, w) = σ a^{w-1} + R(a, w) for small aλ
        for &(a, w, lam) in &[
            (0.3, c64::new(0.75, 3.0), 1.0),
            (1.2, c64::new(0.6, -0.5), 0.5),
            (2.0, c64::new(2.5, 1.0), 1.0),
        ] {
            let direct = cosine_power_tail(a, w, lam).unwrap();
            let split = singular_coefficient(w).unwrap() * (w - 1.0).scale(a.ln()).exp()
                + cosine_power_series(a, w, lam);
            assert!(
                (direct.value - split).norm() <= 1e-12 * split.norm(),
                "{a} {w}"
            );
        }
    }

    #[test]
    fn odd_integer_distance_picks_nearest() {
        assert!(odd_integer_distance(c64::new(1.0, 0.0)) == 0.0);
        assert!((odd_integer_distance(c64::new(2.9, 0.1)) - (0.02f64).sqrt()).abs() < 1e-15);
        assert!((odd_integer_distance(c64::new(-0.5, 0.0)) - 1.5).abs() < 1e-15);
    }
}
