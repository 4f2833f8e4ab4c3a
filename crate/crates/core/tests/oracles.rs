//! Independent routes to quantities the crate computes, and limits with
//! known answers.

use std::f64::consts::PI;

use sonine_core::numerics::{adaptive, cosine_power_tail, gamma_factor, log_gamma};
use sonine_core::projection::{evaluator, project, EvenFunction};
use sonine_core::prolate::{fredholm_det, DetKind};
use sonine_core::structure::{compute_psi, StructureFunctions};
use sonine_core::{c64, SonineContext};

fn rel(a: c64, b: c64) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn tail_integral_matches_direct_quadrature() {
    // Re w = 3 decays fast enough for a truncated direct integral
    for &(a, w, lambda) in &[
        (2.0 * PI * 0.5, c64::new(3.0, 0.0), 0.5),
        (PI, c64::new(3.5, 2.0), 1.0),
        (5.0, c64::new(4.0, -6.0), 0.7),
    ] {
        let fast = cosine_power_tail(a, w, lambda).unwrap();
        let mut g = |t: f64| (-w * t.ln()).exp() * (a * t).cos();
        let mut direct = c64::new(0.0, 0.0);
        let mut x = lambda;
        while x < 4000.0 {
            let y = x + 0.25;
            direct += adaptive(&mut g, x, y, 1e-20, 1e-14).value;
            x = y;
        }
        // |∫_T^∞ t^{-w} cos| ≤ 2T^{-Re w}/a by one integration by parts
        let cut = 2.0 * 4000f64.powf(-w.re) / a;
        assert!(
            (fast.value - direct).norm() <= 1e-11 * fast.value.norm() + cut,
            "a={a} w={w}"
        );
    }
}

#[test]
fn log_gamma_recurrence_and_special_values() {
    let half = log_gamma(c64::new(0.5, 0.0)).unwrap().re - 0.5 * PI.ln();
    assert!(half.abs() < 1e-14, "{half:e}");
    let one = log_gamma(c64::new(1.0, 0.0)).unwrap();
    assert!(one.norm() < 1e-14, "{one}");
    for z in [
        c64::new(0.3, 0.2),
        c64::new(2.5, -7.0),
        c64::new(-3.4, 1.0),
        c64::new(0.75, 40.0),
    ] {
        let lhs = log_gamma(z + 1.0).unwrap() - log_gamma(z).unwrap();
        let d = lhs - z.ln();
        let turns = (d.im / (2.0 * PI)).round();
        assert!(
            (d - c64::new(0.0, 2.0 * PI * turns)).norm() < 1e-12,
            "z={z}"
        );
    }
    // reflection: Γ(z)Γ(1-z) = π / sin(πz)
    let z = c64::new(0.25, 0.5);
    let prod = (log_gamma(z).unwrap() + log_gamma(1.0 - z).unwrap()).exp();
    assert!(rel(prod, PI / (z * PI).sin()) < 1e-13);
    // π^{-1/2}Γ(1/2) = 1
    assert!((gamma_factor(c64::new(1.0, 0.0)).unwrap() - 1.0).norm() < 1e-14);
}

#[test]
fn sinc_matrix_is_the_square_of_the_cosine_matrix() {
    let ctx = SonineContext::new(0.5, 120).unwrap();
    let (f, d) = (ctx.f_matrix(), ctx.d_matrix());
    let n = ctx.n();
    let mut worst: f64 = 0.0;
    for i in (0..n).step_by(7) {
        for j in (0..n).step_by(11) {
            let sq: f64 = (0..n).map(|k| f.get(i, k) * f.get(k, j)).sum();
            worst = worst.max((sq - d.get(i, j)).abs());
        }
    }
    assert!(worst < 1e-12, "worst {worst:e}");
    assert!(ctx.basis().d_consistency(d).unwrap() < 1e-12);
}

#[test]
fn small_lambda_limit() {
    // F_λ ≈ 2·1 ⊗ 1 on (0, λ): μ_0 ≈ 2λ, ψ_± ≈ 2cos(2πλx)
    let lambda = 1e-3;
    let ctx = SonineContext::new(lambda, 32).unwrap();
    let mu0 = ctx.basis().mus()[0];
    assert!((mu0 - 2.0 * lambda).abs() < 1e-8, "mu0 {mu0}");
    let psi = compute_psi(&ctx).unwrap();
    for &x in &[0.0, 0.7, 3.0] {
        let c = 2.0 * (2.0 * PI * lambda * x).cos();
        assert!((psi.psi_plus(x).re - c).abs() < 1e-2);
        assert!((psi.psi_minus(x).re - c).abs() < 1e-2);
    }
    let det = fredholm_det(ctx.basis(), DetKind::OneMinusF).value;
    assert!((det - (1.0 - 2.0 * lambda)).abs() < 1e-8);
}

#[test]
fn two_resolutions_agree() {
    let coarse = SonineContext::new(0.5, 200).unwrap();
    let fine = SonineContext::new(0.5, 320).unwrap();
    let sa = StructureFunctions::new(&coarse).unwrap();
    let sb = StructureFunctions::new(&fine).unwrap();
    for w in [c64::new(0.75, 0.0), c64::new(1.3, 4.0), c64::new(0.5, 9.0)] {
        assert!(
            rel(sa.e(w).unwrap().value, sb.e(w).unwrap().value) < 1e-11,
            "w={w}"
        );
    }
    let (pa, pb) = (compute_psi(&coarse).unwrap(), compute_psi(&fine).unwrap());
    assert!((pa.psi_minus(0.8) - pb.psi_minus(0.8)).norm() < 1e-12);
}

#[test]
fn structure_functions_are_real_on_the_real_axis_and_commute_with_conjugation() {
    let ctx = SonineContext::new(0.5, 200).unwrap();
    let s = StructureFunctions::new(&ctx).unwrap();
    for w in [c64::new(0.8, 2.5), c64::new(1.7, -6.0), c64::new(0.3, 1.0)] {
        let a = s.e(w).unwrap().value;
        let b = s.e(w.conj()).unwrap().value;
        assert!(rel(b, a.conj()) < 1e-12, "w={w}");
    }
    let e = s.e(c64::new(0.9, 0.0)).unwrap().value;
    assert!(e.im.abs() < 1e-13 * e.norm());
}

#[test]
fn evaluator_reproduces_mellin_transforms() {
    let ctx = SonineContext::new(0.5, 200).unwrap();
    let g = project(&ctx, &EvenFunction::gaussian(1.0)).unwrap();
    for w in [c64::new(0.75, 0.0), c64::new(1.5, 2.0)] {
        let x = evaluator(&ctx, w).unwrap();
        let (mellin, paired) = x.pair(&ctx, &g).unwrap();
        assert!(rel(paired, mellin) < 1e-9, "w={w}: {mellin} vs {paired}");
    }
}

#[test]
fn jump_route_agrees_with_mellin_route_off_the_test_grid() {
    let ctx = SonineContext::new(0.7, 200).unwrap();
    let s = StructureFunctions::new(&ctx).unwrap();
    let w = c64::new(1.1, -2.3);
    let a = s.e_mellin_tail(w).unwrap().e;
    let b = s.e_evaluator_jump(w).unwrap().e;
    assert!(rel(a, b) < 1e-9);
}
