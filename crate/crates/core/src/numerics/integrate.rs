use alloc::vec::Vec;

use crate::c64;

/// A value together with an estimate of its absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: c64,
    pub err: f64,
}

impl Estimate {
    pub const ZERO: Estimate = Estimate {
        value: c64::new(0.0, 0.0),
        err: 0.0,
    };

    pub fn exact(value: c64) -> Self {
        Estimate { value, err: 0.0 }
    }
}

impl core::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, rhs: Estimate) -> Estimate {
        Estimate {
            value: self.value + rhs.value,
            err: self.err + rhs.err,
        }
    }
}

impl core::ops::AddAssign for Estimate {
    fn add_assign(&mut self, rhs: Estimate) {
        *self = *self + rhs;
    }
}

#[allow(clippy::excessive_precision)] // tabulated to 21 digits
const GL16_X: [f64; 8] = [
    0.095_012_509_837_637_440_185,
    0.281_603_550_779_258_913_230,
    0.458_016_777_657_227_386_342,
    0.617_876_244_402_643_748_447,
    0.755_404_408_355_003_033_895,
    0.865_631_202_387_831_743_880,
    0.944_575_023_073_232_576_078,
    0.989_400_934_991_649_932_596,
];

#[allow(clippy::excessive_precision)]
const GL16_W: [f64; 8] = [
    0.189_450_610_455_068_496_285,
    0.182_603_415_044_923_588_867,
    0.169_156_519_395_002_538_189,
    0.149_595_988_816_576_732_082,
    0.124_628_971_255_533_872_052,
    0.095_158_511_682_492_784_810,
    0.062_253_523_938_647_892_863,
    0.027_152_459_411_754_094_852,
];

/// Relative accuracy never demanded of a panel, measured against `∫|f|`.
const ROUNDING_FLOOR: f64 = 1e-13;

/// 16-point Gauss–Legendre estimate of `∫_a^b f`.
pub fn gauss16<F: FnMut(f64) -> c64>(f: &mut F, a: f64, b: f64) -> c64 {
    gauss16_with_magnitude(f, a, b).0
}

/// `(∫_a^b f, ∫_a^b |f|)` from the same 16 nodes.
fn gauss16_with_magnitude<F: FnMut(f64) -> c64>(f: &mut F, a: f64, b: f64) -> (c64, f64) {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = c64::new(0.0, 0.0);
    let mut mag = 0.0;
    for k in 0..8 {
        let dx = half * GL16_X[k];
        let (lo, hi) = (f(mid - dx), f(mid + dx));
        acc += (lo + hi) * GL16_W[k];
        mag += (lo.norm() + hi.norm()) * GL16_W[k];
    }
    (acc * half, mag * half.abs())
}

/// Adaptive bisection on `[a, b]` driven by 16-point Gauss rules: a panel is
/// accepted once its estimate agrees with the sum over its two halves.
///
/// The tolerance is `max(abs_tol, rel_tol · |running total|)` distributed in
/// proportion to panel length, floored at `ROUNDING_FLOOR·∫|f|` over the
/// panel. Integrands such as `t^{-w}` with large `|w ln t|` carry relative
/// evaluation errors well above `ε`, and bisection cannot beat those.
pub fn adaptive<F: FnMut(f64) -> c64>(
    f: &mut F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Estimate {
    if a == b {
        return Estimate::ZERO;
    }
    const MAX_DEPTH: u32 = 40;
    let whole = gauss16(f, a, b);
    let mut stack: Vec<(f64, f64, c64, u32)> = alloc::vec![(a, b, whole, 0)];
    let mut total = Estimate::ZERO;
    let scale_len = (b - a).abs();
    let mut scale = whole.norm();
    while let Some((lo, hi, est, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let (left, mag_l) = gauss16_with_magnitude(f, lo, mid);
        let (right, mag_r) = gauss16_with_magnitude(f, mid, hi);
        let refined = left + right;
        let diff = (refined - est).norm();
        scale = scale.max(refined.norm());
        let frac = (hi - lo).abs() / scale_len;
        let tol = (abs_tol.max(rel_tol * scale) * frac).max(ROUNDING_FLOOR * (mag_l + mag_r));
        if diff <= tol || depth >= MAX_DEPTH {
            total += Estimate {
                value: refined,
                // the refined value is far better than the coarse one; the
                // difference is a safe upper bound
                err: diff,
            };
        } else {
            stack.push((mid, hi, right, depth + 1));
            stack.push((lo, mid, left, depth + 1));
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss16_is_exact_for_degree_31() {
        let mut f = |x: f64| c64::new(x.powi(31) + x.powi(30), 0.0);
        let v = gauss16(&mut f, 0.0, 1.0);
        assert!((v.re - (1.0 / 32.0 + 1.0 / 31.0)).abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_oscillation() {
        let mut f = |x: f64| c64::new((40.0 * x).cos(), 0.0);
        let e = adaptive(&mut f, 0.0, 3.0, 1e-15, 1e-14);
        assert!((e.value.re - (120.0f64).sin() / 40.0).abs() < 1e-14);
    }
}
