//! Desk-scale numerics for the de Branges spaces attached to even Sonine
//! functions: square-integrable even functions that vanish on `(-λ, λ)`
//! together with their cosine transform.
//!
//! The crate is `no_std` (with `alloc`). Everything here is a pure function of
//! its inputs; file formats, configuration and the command line live in the
//! `sonine` companion crate.
//!
//! Layout, bottom-up:
//!
//! * [`numerics`]: Gauss–Legendre rules, complex log-Gamma, the tail integral
//!   `∫_λ^∞ t^{-w} cos(at) dt`, adaptive quadrature.
//! * [`linalg`]: dense symmetric eigensolver and Cholesky factorisation.
//! * [`kernels`]: Nyström matrices of the truncated cosine transform `F_λ`
//!   and of the folded sinc kernel `D_λ`, and the cosine transform itself.
//! * [`prolate`]: the even prolate basis, resolvent solves, Fredholm
//!   determinants.
//! * [`mellin`]: product-integration weights for Mellin functionals whose
//!   kernel is singular at the origin.
//! * [`projection`]: orthogonal projection onto the Sonine space, the
//!   verifier, and the evaluators `X_w`.
//! * [`structure`]: `ψ_±`, the distributions `A_λ`, `-iB_λ`, and the entire
//!   functions `E_λ`, `A_λ`, `B_λ`, `K(z_1, z_2)`.
#![no_std]
// `!(x > 0.0)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod context;
pub mod error;
pub mod kernels;
pub mod linalg;
pub mod mellin;
pub mod numerics;
pub mod projection;
pub mod prolate;
pub mod structure;

pub use context::SonineContext;
pub use error::{Error, Result};
pub use numerics::{ComplexPoint, Estimate, QuadratureRule};

/// Complex double used for every spectral variable and sample.
#[allow(non_camel_case_types)]
pub type c64 = num_complex::Complex64;
