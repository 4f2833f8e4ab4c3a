//! One function per subcommand. Each writes its files under the configured
//! output directory and returns what it wrote.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sonine_core::kernels::KernelMatrix;
use sonine_core::projection::{
    corpus, even_norm, project, sonine_norm, t_out_for, verify_sonine, EvenFunction,
};
use sonine_core::prolate::{fredholm_det, DetKind};
use sonine_core::structure::{compute_psi, Method, StructureFunctions};
use sonine_core::{c64, SonineContext};

use crate::config::{Format, RunConfig};
use crate::error::CliError;
use crate::output::{num, write_csv, write_json, write_records_csv};
use crate::report::VerifyReport;
use crate::suite::{self, Suite};

pub fn context(cfg: &RunConfig) -> Result<SonineContext, CliError> {
    let ctx = SonineContext::new(cfg.lambda, cfg.grid_n)?;
    Ok(match cfg.t_out {
        Some(t) => ctx.with_t_out(t)?,
        None => ctx,
    })
}

#[derive(Debug, Serialize)]
struct ProlateSummary {
    lambda: f64,
    grid_n: usize,
    resolved: usize,
    orthonormality_defect: f64,
    eigen_residual: f64,
    det_one_minus_f: f64,
    det_one_plus_f: f64,
    det_one_minus_d: f64,
}

/// `mu.csv` with every eigenvalue, `efuns.csv` with the leading `modes`
/// eigenfunctions at the nodes, and `prolate.json`.
pub fn prolate(cfg: &RunConfig, modes: usize) -> Result<Vec<PathBuf>, CliError> {
    let ctx = context(cfg)?;
    let basis = ctx.basis();
    let dir = &cfg.output_dir;
    let mu = write_csv(
        dir,
        "mu.csv",
        &["n", "mu"],
        basis
            .mus()
            .iter()
            .enumerate()
            .map(|(k, &m)| vec![k.to_string(), num(m)]),
    )?;
    let m = modes.min(basis.len());
    let mut header = vec![String::from("x")];
    header.extend((0..m).map(|k| format!("e{k}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = ctx.rule().nodes().iter().enumerate().map(|(i, &x)| {
        std::iter::once(num(x)).chain(
            basis.efuns()[..m]
                .iter()
                .map(move |e| num(e.values()[i].re)),
        )
    });
    let efuns = write_csv(dir, "efuns.csv", &header, rows)?;
    let summary = ProlateSummary {
        lambda: cfg.lambda,
        grid_n: cfg.grid_n,
        resolved: basis.resolved(),
        orthonormality_defect: basis.orthonormality_defect(),
        eigen_residual: basis.eigen_residual(ctx.f_matrix()),
        det_one_minus_f: fredholm_det(basis, DetKind::OneMinusF).value,
        det_one_plus_f: fredholm_det(basis, DetKind::OnePlusF).value,
        det_one_minus_d: fredholm_det(basis, DetKind::OneMinusD).value,
    };
    let json = write_json(dir, "prolate.json", &summary)?;
    Ok(vec![mu, efuns, json])
}

/// Input functions accepted by `project`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InputSpec {
    /// `e^{-απt²}`.
    Gaussian {
        #[serde(default = "one")]
        alpha: f64,
    },
    /// `e^{-πt²}cos(2πbt)`.
    GaussCos {
        b: f64,
    },
    /// An even Hermite combination anti-invariant under the cosine transform.
    Hermite {},
    /// `1_{t>cut}e^{-απt²}`; the cut defaults to `λ`.
    OneSided {
        cut: Option<f64>,
        #[serde(default = "one")]
        alpha: f64,
    },
    Zero {},
}

fn one() -> f64 {
    1.0
}

/// A corpus name, inline JSON, or the path of a JSON file.
pub fn parse_input(text: &str, lambda: f64) -> Result<(String, EvenFunction), CliError> {
    let text = text.trim();
    if let Some((name, f)) = corpus(lambda).into_iter().find(|(n, _)| *n == text) {
        return Ok((name.to_string(), f));
    }
    if text == "zero" {
        return Ok((String::from("zero"), EvenFunction::Zero));
    }
    let json = if text.starts_with('{') {
        text.to_string()
    } else {
        std::fs::read_to_string(text).map_err(|e| {
            let names: Vec<_> = corpus(lambda).iter().map(|(n, _)| *n).collect();
            CliError::usage(format!(
                "input `{text}` is neither a corpus name ({}, zero) nor a readable file: {e}",
                names.join(", ")
            ))
        })?
    };
    let spec: InputSpec = serde_json::from_str(&json)
        .map_err(|e| CliError::usage(format!("malformed input function: {e}")))?;
    let positive = |name: &str, v: f64| {
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(CliError::usage(format!(
                "`{name}` must be positive and finite"
            )))
        }
    };
    let f = match spec {
        InputSpec::Gaussian { alpha } => EvenFunction::gaussian(positive("alpha", alpha)?),
        InputSpec::GaussCos { b } => {
            if !b.is_finite() {
                return Err(CliError::usage("`b` must be finite"));
            }
            EvenFunction::gauss_cos(b)
        }
        InputSpec::Hermite {} => EvenFunction::hermite_anti(),
        InputSpec::OneSided { cut, alpha } => EvenFunction::one_sided(
            positive("cut", cut.unwrap_or(lambda))?,
            EvenFunction::gaussian(positive("alpha", alpha)?),
        ),
        InputSpec::Zero {} => EvenFunction::Zero,
    };
    Ok((json.trim().to_string(), f))
}

#[derive(Debug, Serialize)]
pub struct ProjectReport {
    pub source: String,
    pub lambda: f64,
    pub t_out: f64,
    pub r1: f64,
    pub r2: f64,
    pub norm_input: f64,
    pub norm_projected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Projects one function; `project.json` holds the Sonine residuals and
/// `project.csv` samples of `f` and `πf` on `[0, t_out]`.
pub fn project_command(
    cfg: &RunConfig,
    input: &str,
    samples: usize,
) -> Result<(ProjectReport, Vec<PathBuf>), CliError> {
    let (source, f) = parse_input(input, cfg.lambda)?;
    let ctx = context(cfg)?;
    let g = project(&ctx, &f)?;
    let tol = cfg.tol("sonine");
    let rep = verify_sonine(&ctx, &g, tol)?;
    let t_out = t_out_for(&ctx, &f)?;
    let norm_input = even_norm(&ctx, &f)?;
    let norm_projected = sonine_norm(&ctx, &g)?;
    let scale = norm_input.max(f64::MIN_POSITIVE);
    let report = ProjectReport {
        source,
        lambda: cfg.lambda,
        t_out,
        r1: rep.r1,
        r2: rep.r2,
        norm_input,
        norm_projected,
        tolerance: tol,
        pass: rep.r1.max(rep.r2) <= tol * scale,
    };
    let ts: Vec<f64> = (0..samples)
        .map(|k| t_out * k as f64 / (samples.max(2) - 1) as f64)
        .collect();
    let rows: Vec<Vec<String>> = ts
        .par_iter()
        .map(|&t| {
            let v = g.value(t)?;
            Ok(vec![num(t), num(f.value(t).re), num(v.re), num(v.im)])
        })
        .collect::<Result<_, sonine_core::Error>>()?;
    let dir = &cfg.output_dir;
    let csv = write_csv(dir, "project.csv", &["t", "f", "pf_re", "pf_im"], rows)?;
    let json = write_json(dir, "project.json", &report)?;
    Ok((report, vec![json, csv]))
}

#[derive(Debug, Serialize)]
struct PsiSummary {
    lambda: f64,
    solve_residual_plus: f64,
    solve_residual_minus: f64,
    extension_defect_plus: f64,
    extension_defect_minus: f64,
}

/// `psi.csv` with `ψ_±` on `[0, 3λ]` and `psi.json` with the residuals.
pub fn psi(cfg: &RunConfig, points: usize) -> Result<Vec<PathBuf>, CliError> {
    let ctx = context(cfg)?;
    let pair = compute_psi(&ctx)?;
    let lambda = cfg.lambda;
    let rows = (0..points).map(|k| {
        let x = 3.0 * lambda * k as f64 / (points.max(2) - 1) as f64;
        vec![num(x), num(pair.psi_plus(x).re), num(pair.psi_minus(x).re)]
    });
    let dir = &cfg.output_dir;
    let csv = write_csv(dir, "psi.csv", &["x", "psi_plus", "psi_minus"], rows)?;
    let summary = PsiSummary {
        lambda,
        solve_residual_plus: pair.solve_residual(1.0),
        solve_residual_minus: pair.solve_residual(-1.0),
        extension_defect_plus: pair.extension_defect(1.0),
        extension_defect_minus: pair.extension_defect(-1.0),
    };
    let json = write_json(dir, "psi.json", &summary)?;
    Ok(vec![csv, json])
}

/// One evaluation of `E`, `A`, `B`. Points where nothing could be computed
/// carry `error` and no values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfuncRecord {
    pub w_re: f64,
    pub w_im: f64,
    #[serde(rename = "E_re")]
    pub e_re: Option<f64>,
    #[serde(rename = "E_im")]
    pub e_im: Option<f64>,
    #[serde(rename = "A_re")]
    pub a_re: Option<f64>,
    #[serde(rename = "A_im")]
    pub a_im: Option<f64>,
    #[serde(rename = "B_re")]
    pub b_re: Option<f64>,
    #[serde(rename = "B_im")]
    pub b_im: Option<f64>,
    pub method: Option<String>,
    pub err: Option<f64>,
    /// Relative difference to the evaluator-jump route where both apply.
    pub discrepancy: Option<f64>,
    pub error: Option<String>,
}

pub const EFUNC_HEADER: [&str; 12] = [
    "w_re",
    "w_im",
    "E_re",
    "E_im",
    "A_re",
    "A_im",
    "B_re",
    "B_im",
    "method",
    "err",
    "discrepancy",
    "error",
];

fn method_name(m: Method) -> &'static str {
    match m {
        Method::MellinTail => "mellin-tail",
        Method::EvaluatorJump => "evaluator-jump",
    }
}

pub fn efunc_record(sf: &StructureFunctions, w: c64) -> EfuncRecord {
    let mut rec = EfuncRecord {
        w_re: w.re,
        w_im: w.im,
        e_re: None,
        e_im: None,
        a_re: None,
        a_im: None,
        b_re: None,
        b_im: None,
        method: None,
        err: None,
        discrepancy: None,
        error: None,
    };
    match sf.e_mellin_tail(w) {
        Ok(ev) => {
            rec.e_re = Some(ev.e.re);
            rec.e_im = Some(ev.e.im);
            rec.a_re = Some(ev.a.re);
            rec.a_im = Some(ev.a.im);
            rec.b_re = Some(ev.b.re);
            rec.b_im = Some(ev.b.im);
            rec.method = Some(method_name(ev.method).into());
            rec.err = Some(ev.err);
            if w.re > 0.5 {
                match sf.e_evaluator_jump(w) {
                    Ok(j) => rec.discrepancy = Some((j.e - ev.e).norm() / ev.e.norm()),
                    Err(e) => rec.error = Some(format!("evaluator-jump: {e}")),
                }
            }
        }
        Err(e) => rec.error = Some(e.to_string()),
    }
    rec
}

/// `E`, `A`, `B` at every configured point, in order.
pub fn efunc(cfg: &RunConfig) -> Result<(Vec<EfuncRecord>, PathBuf), CliError> {
    let ctx = context(cfg)?;
    let sf = StructureFunctions::new(&ctx)?;
    let records: Vec<EfuncRecord> = cfg
        .w_list
        .par_iter()
        .map(|&w| efunc_record(&sf, w))
        .collect();
    let path = match cfg.format {
        Format::Json => write_json(&cfg.output_dir, "efunc.json", &records)?,
        Format::Csv => write_records_csv(&cfg.output_dir, "efunc.csv", &EFUNC_HEADER, &records)?,
    };
    Ok((records, path))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MatrixKind {
    F,
    D,
}

/// The Nyström matrix in long form `(i, j, x_i, x_j, value)`.
pub fn kernel_matrix(cfg: &RunConfig, kind: MatrixKind) -> Result<PathBuf, CliError> {
    let ctx = context(cfg)?;
    let (m, file): (&KernelMatrix, _) = match kind {
        MatrixKind::F => (ctx.f_matrix(), "f_matrix.csv"),
        MatrixKind::D => (ctx.d_matrix(), "d_matrix.csv"),
    };
    let nodes = ctx.rule().nodes();
    let n = m.dim();
    let rows = (0..n * n).map(|k| {
        let (i, j) = (k / n, k % n);
        vec![
            i.to_string(),
            j.to_string(),
            num(nodes[i]),
            num(nodes[j]),
            num(m.get(i, j)),
        ]
    });
    write_csv(
        &cfg.output_dir,
        file,
        &["i", "j", "x_i", "x_j", "value"],
        rows,
    )
}

/// Runs the suites and writes the report.
pub fn verify(cfg: &RunConfig, suites: &[Suite]) -> Result<(VerifyReport, PathBuf), CliError> {
    let report = suite::run(cfg, suites);
    let path = match cfg.format {
        Format::Json => write_json(&cfg.output_dir, "verify.json", &report)?,
        Format::Csv => write_records_csv(
            &cfg.output_dir,
            "verify.csv",
            &[
                "name",
                "tag",
                "criterion",
                "lambda",
                "measured",
                "tolerance",
                "comparison",
                "pass",
                "detail",
            ],
            &report.records,
        )?,
    };
    Ok((report, path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn input_forms() {
        assert_eq!(
            parse_input("gaussian", 0.5).unwrap().1,
            EvenFunction::gaussian(1.0)
        );
        assert_eq!(parse_input("zero", 0.5).unwrap().1, EvenFunction::Zero);
        assert_eq!(
            parse_input(r#"{"kind": "hermite"}"#, 0.5).unwrap().1,
            EvenFunction::hermite_anti()
        );
        let (_, f) = parse_input(r#"{"kind": "gaussian", "alpha": 2.0}"#, 0.5).unwrap();
        assert_eq!(f, EvenFunction::gaussian(2.0));
        let (_, f) = parse_input(r#"{"kind": "one-sided"}"#, 0.5).unwrap();
        assert_eq!(f, EvenFunction::one_sided(0.5, EvenFunction::gaussian(1.0)));
        for bad in [
            r#"{"kind": "gaussian", "alpha": -1}"#,
            r#"{"kind": "cube"}"#,
            r#"{"kind": "hermite", "x": 1}"#,
            "{",
        ] {
            assert!(
                matches!(parse_input(bad, 0.5), Err(CliError::Usage(_))),
                "{bad}"
            );
        }
        assert!(matches!(
            parse_input("/no/such/file.json", 0.5),
            Err(CliError::Usage(_))
        ));
    }
}
