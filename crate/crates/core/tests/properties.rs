//! Structural invariants checked over random parameters.

use proptest::prelude::*;
use sonine_core::kernels::InnerFunction;
use sonine_core::numerics::{cosine_power_tail, gauss_legendre, log_gamma};
use sonine_core::projection::{project, sonine_inner, sonine_norm, verify_sonine, EvenFunction};
use sonine_core::{c64, SonineContext};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gauss_legendre_is_exact_to_degree_2n_minus_1(
        n in 1usize..40,
        a in -2.0f64..1.0,
        len in 0.1f64..3.0,
        coeffs in prop::collection::vec(-1.0f64..1.0, 1..80),
    ) {
        let b = a + len;
        let rule = gauss_legendre(n, a, b).unwrap();
        let deg = coeffs.len().min(2 * n);
        let p = |x: f64| coeffs[..deg].iter().rev().fold(0.0, |acc, c| acc * x + c);
        let exact: f64 = coeffs[..deg]
            .iter()
            .enumerate()
            .map(|(k, c)| c * (b.powi(k as i32 + 1) - a.powi(k as i32 + 1)) / (k as f64 + 1.0))
            .sum();
        let got: f64 = rule.integrate(p);
        let scale: f64 = coeffs.iter().map(|c| c.abs()).sum::<f64>() * len * a.abs().max(b.abs()).max(1.0).powi(deg as i32);
        prop_assert!((got - exact).abs() <= 1e-13 * scale);
        prop_assert!(rule.weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn log_gamma_is_conjugation_symmetric(re in -5.0f64..8.0, im in 0.01f64..60.0) {
        let z = c64::new(re, im);
        let a = log_gamma(z).unwrap();
        let b = log_gamma(z.conj()).unwrap();
        prop_assert!((a.conj() - b).norm() <= 1e-12 * (1.0 + a.norm()));
    }

    #[test]
    fn tail_integral_is_conjugation_symmetric(a in 0.5f64..20.0, re in 0.05f64..3.0, im in -15.0f64..15.0, lambda in 0.1f64..2.0) {
        let w = c64::new(re, im);
        let x = cosine_power_tail(a, w, lambda).unwrap();
        let y = cosine_power_tail(a, w.conj(), lambda).unwrap();
        prop_assert!((x.value.conj() - y.value).norm() <= 1e-12 * x.value.norm().max(1e-300) + x.err + y.err);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn prolate_spectrum_is_ordered_and_inside_the_unit_disc(lambda in 0.1f64..1.2, n in 24usize..96) {
        let ctx = SonineContext::new(lambda, n).unwrap();
        let f = ctx.f_matrix();
        prop_assert!(f.symmetry_defect() == 0.0);
        let mus = ctx.basis().mus();
        prop_assert!(mus.windows(2).all(|p| p[0].abs() >= p[1].abs()));
        prop_assert!(mus.iter().all(|m| m.abs() < 1.0 + 1e-12));
        // trace of F_λ is ∫_0^λ 2cos(2πy²)
        let sum: f64 = mus.iter().sum();
        prop_assert!((sum - f.trace()).abs() < 1e-11 * (1.0 + f.trace().abs()));
        prop_assert!(ctx.basis().orthonormality_defect() < 1e-11);
    }

    #[test]
    fn inner_functions_combine_linearly(lambda in 0.2f64..1.5, a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let ctx = SonineContext::new(lambda, 32).unwrap();
        let rule = ctx.rule().clone();
        let u = InnerFunction::from_fn(rule.clone(), |y| c64::new(y.cos(), y)).unwrap();
        let v = InnerFunction::from_fn(rule, |y| c64::new(1.0, -y * y)).unwrap();
        let lhs = u.combine(c64::new(a, 0.0), &v, c64::new(b, 0.0));
        let fu = ctx.apply_f(&u).combine(c64::new(a, 0.0), &ctx.apply_f(&v), c64::new(b, 0.0));
        let diff = ctx.apply_f(&lhs).combine(c64::new(1.0, 0.0), &fu, c64::new(-1.0, 0.0));
        prop_assert!(diff.sup() < 1e-13 * (1.0 + lhs.sup()));
    }

    #[test]
    fn projections_vanish_and_do_not_grow_norms(lambda in 0.3f64..0.9, alpha in 0.6f64..2.5, b in 0.0f64..1.2) {
        let ctx = SonineContext::new(lambda, 96).unwrap();
        for f in [EvenFunction::gaussian(alpha), EvenFunction::gauss_cos(b)] {
            let g = project(&ctx, &f).unwrap();
            let rep = verify_sonine(&ctx, &g, 1e-7).unwrap();
            prop_assert!(rep.pass, "{f:?}: {rep:?}");
            let ng = sonine_norm(&ctx, &g).unwrap();
            let nf = sonine_core::projection::even_norm(&ctx, &f).unwrap();
            prop_assert!(ng <= nf * (1.0 + 1e-10));
            let self_inner = sonine_inner(&ctx, &g, &g).unwrap().value;
            prop_assert!(self_inner.im.abs() <= 1e-12 * self_inner.re.abs().max(1e-300));
        }
    }
}
