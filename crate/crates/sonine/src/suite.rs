//! Verification suites. Every check becomes a [`CheckRecord`]; a failed
//! computation is reported as a failing record rather than aborting the run.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use sonine_core::c64;
use sonine_core::projection::{
    corpus, even_norm, idempotence_defect, orthogonality_defect, project, sonine_norm,
    verify_sonine, EvenFunction, SonineFunction,
};
use sonine_core::prolate::{fredholm_det, lemma_residual, DetKind};
use sonine_core::structure::{
    build_distributions, compute_psi, de_branges_grid, CriticalLine, StructureFunctions,
};
use sonine_core::{Error, SonineContext};

use crate::config::{format_complex, RunConfig};
use crate::error::CliError;
use crate::report::{CheckId, CheckRecord, Comparison, VerifyReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Prolate,
    Sonine,
    Psi,
    Efunc,
    Kernel,
    Isometry,
    Convergence,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Prolate,
        Suite::Sonine,
        Suite::Psi,
        Suite::Efunc,
        Suite::Kernel,
        Suite::Isometry,
        Suite::Convergence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Prolate => "prolate",
            Suite::Sonine => "sonine",
            Suite::Psi => "psi",
            Suite::Efunc => "efunc",
            Suite::Kernel => "kernel",
            Suite::Isometry => "isometry",
            Suite::Convergence => "convergence",
        }
    }

    /// Comma-separated names, `all` for every suite. Duplicates are dropped
    /// and the canonical order is kept.
    pub fn parse_list(s: &str) -> Result<Vec<Suite>, CliError> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if part == "all" {
                out.extend(Suite::ALL);
            } else {
                out.push(part.parse()?);
            }
        }
        if out.is_empty() {
            return Err(CliError::usage("no suite selected"));
        }
        out.sort();
        out.dedup();
        Ok(out)
    }
}

impl FromStr for Suite {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(|x| x.name()).collect();
                CliError::usage(format!(
                    "unknown suite `{s}`; known: all, {}",
                    names.join(", ")
                ))
            })
    }
}

type Outcome = Result<(f64, String), Error>;

/// Shared state of one run.
struct Run<'a> {
    cfg: &'a RunConfig,
    ctx: &'a SonineContext,
    structure: Option<&'a Result<StructureFunctions<'a>, Error>>,
    records: Vec<CheckRecord>,
}

impl<'a> Run<'a> {
    fn record(&mut self, id: CheckId, tolerance: f64, outcome: Outcome) {
        let lambda = self.cfg.lambda;
        self.records.push(match outcome {
            Ok((value, detail)) => CheckRecord::measured(id, lambda, value, tolerance, detail),
            Err(e) => CheckRecord::failed(id, lambda, tolerance, e),
        });
    }

    fn structure(&self) -> Result<&'a StructureFunctions<'a>, Error> {
        match self.structure {
            Some(Ok(s)) => Ok(s),
            Some(Err(e)) => Err(e.clone()),
            None => unreachable!("structure functions are built for every suite that needs them"),
        }
    }
}

fn at_most(name: impl Into<String>, tag: &'static str, criterion: Option<u32>) -> CheckId {
    CheckId::new(name, tag, criterion, Comparison::AtMost)
}

fn sign_name(sign: f64) -> &'static str {
    if sign > 0.0 {
        "plus"
    } else {
        "minus"
    }
}

/// Runs the selected suites at the configured `λ` and grid.
pub fn run(cfg: &RunConfig, suites: &[Suite]) -> VerifyReport {
    let names = suites.iter().map(|s| s.name().to_string()).collect();
    let ctx = SonineContext::new(cfg.lambda, cfg.grid_n).and_then(|c| match cfg.t_out {
        Some(t) => c.with_t_out(t),
        None => Ok(c),
    });
    let ctx = match ctx {
        Ok(c) => c,
        Err(e) => {
            let rec = CheckRecord::failed(
                at_most("context", "setup", None),
                cfg.lambda,
                0.0,
                format!("cannot build the discretisation: {e}"),
            );
            return VerifyReport::new(cfg.lambda, cfg.grid_n, names, vec![rec]);
        }
    };
    let needs_structure = suites.iter().any(|s| {
        matches!(
            s,
            Suite::Efunc | Suite::Kernel | Suite::Isometry | Suite::Convergence
        )
    });
    let structure = needs_structure.then(|| StructureFunctions::new(&ctx));
    let mut run = Run {
        cfg,
        ctx: &ctx,
        structure: structure.as_ref(),
        records: Vec::new(),
    };
    for &s in suites {
        match s {
            Suite::Prolate => prolate_suite(&mut run),
            Suite::Sonine => sonine_suite(&mut run),
            Suite::Psi => psi_suite(&mut run),
            Suite::Efunc => efunc_suite(&mut run),
            Suite::Kernel => kernel_suite(&mut run),
            Suite::Isometry => isometry_suite(&mut run),
            Suite::Convergence => convergence_suite(&mut run),
        }
    }
    VerifyReport::new(cfg.lambda, cfg.grid_n, names, run.records)
}

/// `count` midpoints of `(0, 3λ)`.
fn outer_grid(lambda: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| 3.0 * lambda * (k as f64 + 0.5) / count as f64)
        .collect()
}

fn prolate_suite(run: &mut Run) {
    let basis = run.ctx.basis();
    let grid = outer_grid(run.cfg.lambda, 64);
    let modes = basis.len().min(10);
    let tol = run.cfg.tol("lemma");
    for sign in [1.0, -1.0] {
        let res: Vec<f64> = (0..modes)
            .into_par_iter()
            .map(|k| lemma_residual(basis, k, sign, &grid))
            .collect();
        let (worst, value) = res.iter().enumerate().fold((0, 0.0), |acc, (k, &r)| {
            if r > acc.1 || r.is_nan() {
                (k, r)
            } else {
                acc
            }
        });
        let detail = format!(
            "modes 0..{modes}, worst mode {worst}, mu = {:.6e}",
            basis.mus()[worst]
        );
        run.record(
            at_most(
                format!("eigen-lift/{}", sign_name(sign)),
                "eigen-lift",
                Some(3),
            ),
            tol,
            Ok((value, detail)),
        );
    }
    let outcome = basis
        .d_consistency(run.ctx.d_matrix())
        .map(|v| (v, format!("{} resolved modes", basis.resolved())));
    run.record(
        at_most("sinc-square", "sinc-square", None),
        run.cfg.tol("sinc-square"),
        outcome,
    );
}

fn sonine_suite(run: &mut Run) {
    let ctx = run.ctx;
    let lambda = run.cfg.lambda;
    let fs = corpus(lambda);
    let projected: Vec<(Result<SonineFunction, _>, Result<f64, _>)> = fs
        .par_iter()
        .map(|(_, f)| (project(ctx, f), even_norm(ctx, f)))
        .collect();
    let tol = run.cfg.tol("sonine");
    for ((name, _), (g, norm)) in fs.iter().zip(&projected) {
        let outcome = (|| {
            let (g, norm) = (g.clone()?, norm.clone()?);
            let rep = verify_sonine(ctx, &g, tol)?;
            Ok((
                rep.r1.max(rep.r2) / norm,
                format!("r1 = {:.3e}, r2 = {:.3e}, |f| = {norm:.6e}", rep.r1, rep.r2),
            ))
        })();
        run.record(
            at_most(
                format!("sonine-vanishing/{name}"),
                "sonine-vanishing",
                Some(1),
            ),
            tol,
            outcome,
        );
    }
    let tol = run.cfg.tol("algebra");
    let idem: Vec<Outcome> = projected
        .par_iter()
        .map(|(g, norm)| {
            let (g, norm) = (g.clone()?, norm.clone()?);
            Ok((idempotence_defect(ctx, &g)? / norm, String::new()))
        })
        .collect();
    for ((name, _), outcome) in fs.iter().zip(idem) {
        run.record(
            at_most(format!("idempotence/{name}"), "projection-algebra", Some(2)),
            tol,
            outcome,
        );
    }
    // ⟨f - πf, h⟩ against the projection of the next corpus entry
    let orth: Vec<Outcome> = (0..fs.len())
        .into_par_iter()
        .map(|k| {
            let j = (k + 1) % fs.len();
            let (pf, nf) = (projected[k].0.clone()?, projected[k].1.clone()?);
            let h = projected[j].0.clone()?;
            let nh = sonine_norm(ctx, &h)?;
            let d = orthogonality_defect(ctx, &fs[k].1, &pf, &h)?;
            Ok((d / (nf * nh), format!("against pi({})", fs[j].0)))
        })
        .collect();
    for ((name, _), outcome) in fs.iter().zip(orth) {
        run.record(
            at_most(
                format!("orthogonality/{name}"),
                "projection-algebra",
                Some(2),
            ),
            tol,
            outcome,
        );
    }
}

fn psi_suite(run: &mut Run) {
    let ctx = run.ctx;
    let lambda = run.cfg.lambda;
    let psi = match compute_psi(ctx) {
        Ok(p) => p,
        Err(e) => {
            for sign in [1.0, -1.0] {
                let id = at_most(
                    format!("psi-equation/{}", sign_name(sign)),
                    "psi-equation",
                    Some(4),
                );
                run.record(id, run.cfg.tol("psi"), Err(e.clone()));
            }
            return;
        }
    };
    let grid = outer_grid(lambda, 20);
    let tol = run.cfg.tol("psi");
    for sign in [1.0, -1.0] {
        let outcome = psi.check_rule().map(|check| {
            let value = grid
                .par_iter()
                .map(|&x| psi.defining_residual(sign, x, &check))
                .reduce(|| 0.0, f64::max);
            let detail = format!(
                "20 points in (0, 3 lambda), solve residual {:.3e}",
                psi.solve_residual(sign)
            );
            (value, detail)
        });
        run.record(
            at_most(
                format!("psi-equation/{}", sign_name(sign)),
                "psi-equation",
                Some(4),
            ),
            tol,
            outcome,
        );
    }
    let (a, mib) = build_distributions(&psi);
    for (label, d) in [("A", &a), ("-iB", &mib)] {
        let value = d.vanishing_residual(ctx);
        run.record(
            at_most(
                format!("distribution-vanishing/{label}"),
                "distribution-parity",
                None,
            ),
            run.cfg.tol("vanishing"),
            Ok((value, String::from("sup over the nodes of (0, lambda)"))),
        );
        for (fname, phi) in [
            ("gaussian(2)", EvenFunction::gaussian(2.0)),
            ("gauss-cos", EvenFunction::gauss_cos(0.7)),
        ] {
            let outcome = d.invariance_defect(ctx, &phi).map(|(defect, scale)| {
                (
                    defect / scale,
                    format!("defect {defect:.3e}, scale {scale:.3e}"),
                )
            });
            run.record(
                at_most(
                    format!("distribution-parity/{label}/{fname}"),
                    "distribution-parity",
                    None,
                ),
                run.cfg.tol("parity"),
                outcome,
            );
        }
    }
}

/// `(max, argmax)` of per-point outcomes; the first error wins.
fn worst_of(values: Vec<(c64, Result<f64, Error>)>) -> Result<(f64, c64), Error> {
    let mut best = (0.0, c64::new(f64::NAN, 0.0));
    for (w, v) in values {
        let v = v?;
        if v > best.0 || v.is_nan() || best.1.re.is_nan() {
            best = (v, w);
        }
    }
    Ok(best)
}

/// `Re w ∈ {0.6, 0.75, 1, 1.5, 2.5}`, `Im w ∈ {0, 1, 3}`.
pub fn route_points() -> Vec<c64> {
    let mut out = Vec::new();
    for &re in &[0.6, 0.75, 1.0, 1.5, 2.5] {
        for &im in &[0.0, 1.0, 3.0] {
            out.push(c64::new(re, im));
        }
    }
    out
}

/// Ten points of the critical strip `0 < Re w < 1`.
pub fn strip_points() -> Vec<c64> {
    [
        (0.6, 0.0),
        (0.75, 1.0),
        (0.9, -2.0),
        (0.55, 3.5),
        (0.3, 5.0),
        (0.8, -7.0),
        (0.15, 0.5),
        (0.65, 10.0),
        (0.4, -12.5),
        (0.95, 15.0),
    ]
    .iter()
    .map(|&(re, im)| c64::new(re, im))
    .collect()
}

/// Ten pairs `(z_1, z_2)` with `z_1 + z_2 - 1` away from zero.
pub fn kernel_pairs() -> Vec<(c64, c64)> {
    [
        ((0.7, 0.3), (1.3, -2.0)),
        ((0.2, 1.0), (2.0, 0.5)),
        ((0.5, 0.0), (0.75, 0.0)),
        ((1.0, 2.0), (1.0, -1.0)),
        ((0.6, -3.0), (0.9, 4.0)),
        ((1.5, 0.0), (0.4, 0.2)),
        ((0.3, 5.0), (0.8, 5.0)),
        ((2.5, -1.0), (0.1, 0.0)),
        ((0.55, 0.7), (0.65, -0.1)),
        ((1.2, 8.0), (1.7, -6.0)),
    ]
    .iter()
    .map(|&((a, b), (c, d))| (c64::new(a, b), c64::new(c, d)))
    .collect()
}

/// `τ ∈ [0, 20]` in steps of `0.05`.
pub fn critical_taus() -> Vec<f64> {
    (0..=400).map(|k| 0.05 * k as f64).collect()
}

fn efunc_suite(run: &mut Run) {
    let ids = [
        (
            at_most("routes", "mellin-route", Some(5)),
            run.cfg.tol("routes"),
        ),
        (
            CheckId::new(
                "de-branges-margin",
                "de-branges",
                Some(6),
                Comparison::Above,
            ),
            0.0,
        ),
        (
            at_most("functional-equation", "functional-equation", Some(7)),
            run.cfg.tol("symmetry"),
        ),
        (
            at_most("critical-line-reality", "functional-equation", Some(9)),
            run.cfg.tol("reality"),
        ),
        (
            CheckId::new(
                "critical-line-zeros",
                "de-branges",
                Some(9),
                Comparison::AtLeast,
            ),
            2.0,
        ),
        (
            CheckId::new(
                "critical-line-interlacing",
                "de-branges",
                Some(9),
                Comparison::AtLeast,
            ),
            1.0,
        ),
    ];
    let sf = match run.structure() {
        Ok(s) => s,
        Err(e) => {
            for (id, tol) in ids {
                run.record(id, tol, Err(e.clone()));
            }
            return;
        }
    };
    let [routes, margin, symmetry, reality, zeros, interlacing] = ids;

    let rel: Vec<_> = route_points()
        .into_par_iter()
        .map(|w| {
            let r = (|| {
                let a = sf.e_mellin_tail(w)?.e;
                let b = sf.e_evaluator_jump(w)?.e;
                Ok::<_, Error>((a - b).norm() / a.norm())
            })();
            (w, r)
        })
        .collect();
    let outcome =
        worst_of(rel).map(|(v, w)| (v, format!("15 points, worst at w = {}", format_complex(w))));
    run.record(routes.0, routes.1, outcome);

    let grid = de_branges_grid();
    let parts: Vec<_> = grid.par_chunks(9).map(|c| sf.de_branges(c)).collect();
    let outcome = parts
        .into_iter()
        .try_fold((f64::INFINITY, c64::new(0.0, 0.0)), |acc, r| {
            let r = r?;
            Ok(if r.margin < acc.0 || r.margin.is_nan() {
                (r.margin, r.worst)
            } else {
                acc
            })
        });
    let outcome = outcome.map(|(m, w)| {
        (
            m,
            format!(
                "{} points, min (|E(w)| - |E(1-w)|)/|E(w)| at w = {}",
                grid.len(),
                format_complex(w)
            ),
        )
    });
    run.record(margin.0, margin.1, outcome);

    let sym: Vec<_> = strip_points()
        .into_par_iter()
        .map(|w| (w, sf.symmetry_defect(w).map(|(a, b)| a.max(b))))
        .collect();
    let outcome = worst_of(sym).map(|(v, w)| {
        (
            v,
            format!("10 strip points, worst at w = {}", format_complex(w)),
        )
    });
    run.record(symmetry.0, symmetry.1, outcome);

    let taus = critical_taus();
    let line: Result<Vec<_>, _> = taus.par_iter().map(|&t| sf.a_b(c64::new(0.5, t))).collect();
    match line {
        Ok(ab) => {
            let cl = CriticalLine {
                taus: taus.clone(),
                a: ab.iter().map(|p| p.0.value).collect(),
                b: ab.iter().map(|p| p.1.value).collect(),
            };
            let (da, db) = cl.imaginary_defects();
            run.record(
                reality.0,
                reality.1,
                Ok((
                    da.max(db),
                    format!("max |Im A|/|E| = {da:.3e}, max |Im B|/|E| = {db:.3e}"),
                )),
            );
            let (za, zb) = (cl.zeros_a(), cl.zeros_b());
            let mut detail = String::from("zeros of A:");
            for z in &za {
                let _ = write!(detail, " {z:.4}");
            }
            detail.push_str("; zeros of B:");
            for z in &zb {
                let _ = write!(detail, " {z:.4}");
            }
            run.record(
                zeros.0,
                zeros.1,
                Ok((za.len().min(zb.len()) as f64, detail)),
            );
            let inter = if cl.interlaced() { 1.0 } else { 0.0 };
            run.record(
                interlacing.0,
                interlacing.1,
                Ok((
                    inter,
                    format!("{} + {} zeros on [0, 20]", za.len(), zb.len()),
                )),
            );
        }
        Err(e) => {
            for (id, tol) in [reality, zeros, interlacing] {
                run.record(id, tol, Err(e.clone()));
            }
        }
    }
}

fn kernel_suite(run: &mut Run) {
    let tol = run.cfg.tol("kernel");
    let forms = at_most("kernel-forms", "kernel-forms", Some(8));
    let symmetry = at_most("kernel-symmetry", "kernel-forms", Some(8));
    let sf = match run.structure() {
        Ok(s) => s,
        Err(e) => {
            run.record(forms, tol, Err(e.clone()));
            run.record(symmetry, tol, Err(e.clone()));
            return;
        }
    };
    let values: Vec<_> = kernel_pairs()
        .into_par_iter()
        .map(|(z1, z2)| {
            let r = (|| {
                let k = sf.kernel(z1, z2)?;
                let t = sf.kernel(z2, z1)?;
                let sym = (k.value() - t.value()).norm() / k.value().norm();
                Ok::<_, Error>((k.discrepancy(), sym))
            })();
            (z1, r)
        })
        .collect();
    let mut disc = Vec::new();
    let mut sym = Vec::new();
    for (z, r) in values {
        match r {
            Ok((d, s)) => {
                disc.push((z, Ok(d)));
                sym.push((z, Ok(s)));
            }
            Err(e) => {
                disc.push((z, Err(e.clone())));
                sym.push((z, Err(e)));
            }
        }
    }
    let detail = |(v, z): (f64, c64)| {
        (
            v,
            format!("10 pairs, worst with z1 = {}", format_complex(z)),
        )
    };
    run.record(forms, tol, worst_of(disc).map(detail));
    run.record(symmetry, tol, worst_of(sym).map(detail));
}

/// Truncation and panel width of the critical-line integrals.
const LINE_T: f64 = 40.0;
const LINE_PANEL: f64 = 1.0;

fn isometry_suite(run: &mut Run) {
    let ctx = run.ctx;
    let tol = run.cfg.tol("isometry");
    let tests = [
        ("gaussian", EvenFunction::gaussian(1.0)),
        ("gaussian-narrow", EvenFunction::gaussian(2.0)),
    ];
    let ids: Vec<CheckId> = tests
        .iter()
        .map(|(n, _)| at_most(format!("isometry/{n}"), "isometry", Some(10)))
        .collect();
    let outcome = (|| {
        let sf = run.structure()?;
        let fs: Vec<SonineFunction> = tests
            .iter()
            .map(|(_, f)| project(ctx, f))
            .collect::<Result<_, _>>()?;
        let norms: Vec<f64> = fs
            .iter()
            .map(|g| sonine_norm(ctx, g))
            .collect::<Result<_, _>>()?;
        let lines = sf.line_norms(&fs, LINE_T, LINE_PANEL)?;
        Ok::<_, Error>(norms.into_iter().zip(lines).collect::<Vec<_>>())
    })();
    match outcome {
        Ok(pairs) => {
            for (id, (norm, line)) in ids.into_iter().zip(pairs) {
                let n2 = norm * norm;
                let full = ((line.value + line.remainder) / n2).sqrt();
                let truncated = (line.value / n2).sqrt();
                let detail = format!(
                    "line norm / |f| = {full:.6} with remainder {:.3e}, {truncated:.6} truncated at |t| = {LINE_T}",
                    line.remainder
                );
                run.record(id, tol, Ok(((full - 1.0).abs(), detail)));
            }
        }
        Err(e) => {
            for id in ids {
                run.record(id, tol, Err(e.clone()));
            }
        }
    }
}

/// The four monitored quantities at one resolution.
fn monitored(
    ctx: &SonineContext,
    structure: Option<&StructureFunctions>,
) -> [Result<f64, Error>; 4] {
    let basis = ctx.basis();
    let psi = compute_psi(ctx).map(|p| p.psi_plus(0.0).re);
    let e = match structure {
        Some(s) => s.e(c64::new(0.75, 0.0)).map(|e| e.value.re),
        None => StructureFunctions::new(ctx)
            .and_then(|s| s.e(c64::new(0.75, 0.0)))
            .map(|e| e.value.re),
    };
    [
        basis
            .mus()
            .first()
            .copied()
            .ok_or(Error::Numeric("empty basis")),
        psi,
        e,
        Ok(fredholm_det(basis, DetKind::OneMinusD).value),
    ]
}

fn convergence_suite(run: &mut Run) {
    let tol = run.cfg.tol("convergence");
    let names = ["mu0", "psi-plus(0)", "E(0.75)", "det(1-D)"];
    let tags = ["eigen-lift", "psi-equation", "mellin-route", "sinc-square"];
    let coarse = monitored(run.ctx, run.structure().ok());
    let fine_n = 2 * run.cfg.grid_n;
    let fine_ctx = SonineContext::new(run.cfg.lambda, fine_n);
    let fine: [Result<f64, Error>; 4] = match &fine_ctx {
        Ok(c) => monitored(c, None).map(|r| r),
        Err(e) => std::array::from_fn(|_| Err(e.clone())),
    };
    for (k, (c, f)) in coarse.into_iter().zip(fine).enumerate() {
        let outcome = (|| {
            let (c, f) = (c?, f?);
            let rel = (c - f).abs() / f.abs();
            Ok::<_, Error>((
                rel,
                format!("n = {}: {c:.15e}, n = {fine_n}: {f:.15e}", run.cfg.grid_n),
            ))
        })();
        run.record(
            at_most(format!("convergence/{}", names[k]), tags[k], Some(11)),
            tol,
            outcome,
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_lists() {
        assert_eq!(Suite::parse_list("all").unwrap(), Suite::ALL.to_vec());
        assert_eq!(
            Suite::parse_list("psi, prolate,psi").unwrap(),
            vec![Suite::Prolate, Suite::Psi]
        );
        assert!(Suite::parse_list("bogus").is_err());
        assert!(Suite::parse_list("").is_err());
    }

    #[test]
    fn sample_sets() {
        assert_eq!(route_points().len(), 15);
        assert!(strip_points().iter().all(|w| w.re > 0.0 && w.re < 1.0));
        assert_eq!(strip_points().len(), 10);
        assert!(kernel_pairs()
            .iter()
            .all(|(a, b)| (a + b - 1.0).norm() > 0.1));
        let t = critical_taus();
        assert_eq!((t.len(), t[0], t[400]), (401, 0.0, 20.0));
    }

    #[test]
    fn failing_context_is_a_record() {
        let cfg = RunConfig {
            grid_n: 0,
            ..RunConfig::default()
        };
        let rep = run(&cfg, &[Suite::Prolate]);
        assert!(!rep.pass);
        assert_eq!(rep.records.len(), 1);
    }
}
