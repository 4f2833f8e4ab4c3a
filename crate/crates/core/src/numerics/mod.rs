//! Quadrature, complex log-Gamma and the oscillatory tail integral that every
//! Mellin evaluation reduces to.

mod gamma;
mod integrate;
mod quadrature;
mod tail;

pub use gamma::{gamma_factor, ln_cos, ln_sin, log_gamma};
pub use integrate::{adaptive, gauss16, Estimate};
pub use quadrature::{gauss_legendre, QuadratureRule};
pub(crate) use tail::{cosine_power_series, odd_integer_distance};
pub use tail::{cosine_power_tail, singular_coefficient};

use crate::c64;

/// A point of the spectral plane (`w`, `s`, `z_1`, `z_2`). The critical
/// line `Re = 1/2` is the symmetry axis, `w^# = 1 - conj(w)`.
pub type ComplexPoint = c64;

pub(crate) fn is_finite(z: c64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
