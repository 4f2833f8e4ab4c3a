use core::f64::consts::PI;
#[allow(unused_imports)] // inherent f64 math is only visible when std is linked
use num_traits::Float;

use crate::c64;
use crate::error::{Error, Result};

/// `B_{2k} / (2k (2k-1))` for `k = 1..=7`.
const STIRLING: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
];

const SHIFT_RADIUS: f64 = 10.0;

/// Complex log-Gamma.
///
/// Reflection maps `Re z < 1/2` to the right half-plane, the recursion
/// `Γ(z+1) = zΓ(z)` pushes the argument out to `|z| ≥ 10`, and the Stirling
/// series through `B_14` finishes. The imaginary part is only determined
/// modulo `2π` on the reflected branch; `exp` of the result is what callers
/// rely on.
pub fn log_gamma(z: c64) -> Result<c64> {
    if !super::is_finite(z) {
        return Err(Error::InvalidArgument("log_gamma needs a finite argument"));
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Err(Error::Pole);
    }
    if z.re < 0.5 {
        let one_minus = c64::new(1.0, 0.0) - z;
        let reflected = stirling_shifted(one_minus);
        return Ok(c64::new(PI.ln(), 0.0) - ln_sin(z * PI) - reflected);
    }
    Ok(stirling_shifted(z))
}

fn stirling_shifted(mut z: c64) -> c64 {
    // one logarithm of the accumulated product keeps the real part accurate
    let mut product = c64::new(1.0, 0.0);
    let mut arg = 0.0;
    while z.norm() < SHIFT_RADIUS {
        product *= z;
        arg += z.im.atan2(z.re);
        z += 1.0;
    }
    let shift = c64::new(product.norm().ln(), arg);
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = c64::new(0.0, 0.0);
    let mut power = inv;
    for c in STIRLING {
        series += power * c;
        power *= inv2;
    }
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series - shift
}

/// `ln sin z`, safe against overflow for large `|Im z|`.
pub fn ln_sin(z: c64) -> c64 {
    if z.im.abs() < 20.0 {
        return z.sin().ln();
    }
    let i = c64::new(0.0, 1.0);
    if z.im > 0.0 {
        -i * z + c64::new(0.0, 0.5).ln() + (c64::new(1.0, 0.0) - (i * z * 2.0).exp()).ln()
    } else {
        i * z + c64::new(0.0, -0.5).ln() + (c64::new(1.0, 0.0) - (-i * z * 2.0).exp()).ln()
    }
}

/// `ln cos z`, safe against overflow for large `|Im z|`.
pub fn ln_cos(z: c64) -> c64 {
    if z.im.abs() < 20.0 {
        return z.cos().ln();
    }
    let i = c64::new(0.0, 1.0);
    let ln2 = 2.0f64.ln();
    if z.im > 0.0 {
        -i * z - ln2 + (c64::new(1.0, 0.0) + (i * z * 2.0).exp()).ln()
    } else {
        i * z - ln2 + (c64::new(1.0, 0.0) + (-i * z * 2.0).exp()).ln()
    }
}

/// The completing factor `π^{-w/2} Γ(w/2)`.
pub fn gamma_factor(w: c64) -> Result<c64> {
    let half = w * 0.5;
    Ok((log_gamma(half)? - half * PI.ln()).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: c64, b: c64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1e-300)
    }

    #[test]
    fn classical_values() {
        assert!(log_gamma(c64::new(1.0, 0.0)).unwrap().norm() < 1e-14);
        let half = log_gamma(c64::new(0.5, 0.0)).unwrap();
        assert!((half.re - 0.5 * PI.ln()).abs() < 1e-14);
        assert!(half.im.abs() < 1e-15);
        // Γ(5) = 24
        let g5 = log_gamma(c64::new(5.0, 0.0)).unwrap().exp();
        assert!(close(g5, c64::new(24.0, 0.0), 1e-14));
    }

    #[test]
    fn poles_are_rejected() {
        for k in 0..5 {
            assert_eq!(log_gamma(c64::new(-(k as f64), 0.0)), Err(Error::Pole));
        }
    }

    #[test]
    fn reflection_formula() {
        // Γ(z)Γ(1-z) = π / sin(πz)
        for &z in &[
            c64::new(-2.3, 0.7),
            c64::new(0.2, -3.0),
            c64::new(-7.5, 0.1),
        ] {
            let lhs = (log_gamma(z).unwrap() + log_gamma(c64::new(1.0, 0.0) - z).unwrap()).exp();
            let rhs = c64::new(PI, 0.0) / (z * PI).sin();
            assert!(close(lhs, rhs, 1e-12), "{z}");
        }
    }

    #[test]
    fn recursion_holds_off_axis() {
        for &z in &[
            c64::new(0.25, 1.0),
            c64::new(3.0, -17.0),
            c64::new(0.6, 45.0),
        ] {
            let a = log_gamma(z + 1.0).unwrap().exp();
            let b = log_gamma(z).unwrap().exp() * z;
            assert!(close(a, b, 1e-12), "{z}");
        }
    }

    #[test]
    fn ln_trig_match_direct_values() {
        for &z in &[c64::new(0.3, 25.0), c64::new(-1.2, -30.0)] {
            let s = ln_sin(z) - z.sin().ln();
            let c = ln_cos(z) - z.cos().ln();
            // equal modulo 2πi
            assert!(
                s.re.abs() < 1e-12 && ((s.im / (2.0 * PI)).round() * 2.0 * PI - s.im).abs() < 1e-9
            );
            assert!(
                c.re.abs() < 1e-12 && ((c.im / (2.0 * PI)).round() * 2.0 * PI - c.im).abs() < 1e-9
            );
        }
    }
}
