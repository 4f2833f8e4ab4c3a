//! Acceptance run: every criterion at λ ∈ {0.5, 1, 2} on the default grid,
//! one PASS/FAIL line per criterion. Run with
//! `cargo test -p sonine --test acceptance -- --nocapture`.

use sonine::report::{CheckRecord, VerifyReport};
use sonine::suite::{self, Suite};
use sonine::RunConfig;

const LAMBDAS: [f64; 3] = [0.5, 1.0, 2.0];

const CRITERIA: [(u32, &str); 11] = [
    (1, "Sonine vanishing of projections"),
    (2, "projection idempotence and orthogonality"),
    (3, "eigen-lift residual, top 10 modes"),
    (4, "psi defining equation off the grid"),
    (5, "mellin-tail vs evaluator-jump routes for E"),
    (6, "de Branges inequality |E(w)| > |E(1-w)|"),
    (7, "functional-equation symmetry of A, B"),
    (8, "kernel product vs split form, symmetry"),
    (9, "critical-line reality, zeros, interlacing"),
    (10, "isometry onto the de Branges space"),
    (11, "stability under grid doubling"),
];

fn measured(r: &CheckRecord) -> String {
    r.measured
        .map_or_else(|| String::from("-"), |m| format!("{m:.3e}"))
}

fn summary(report: &VerifyReport, k: u32) -> (bool, String) {
    let recs: Vec<&CheckRecord> = report.criterion(k).collect();
    if recs.is_empty() {
        // the discretisation itself could not be built
        let why = report.records.first().map_or("", |r| r.detail.as_str());
        return (false, format!("λ={} FAIL [{why}]", report.lambda));
    }
    let failing: Vec<String> = recs
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{}={}", r.name, measured(r)))
        .collect();
    if failing.is_empty() {
        (true, format!("λ={} ok", report.lambda))
    } else {
        (
            false,
            format!("λ={} FAIL [{}]", report.lambda, failing.join(", ")),
        )
    }
}

#[test]
fn acceptance() {
    let reports: Vec<VerifyReport> = LAMBDAS
        .iter()
        .map(|&lambda| {
            let cfg = RunConfig {
                lambda,
                ..RunConfig::default()
            };
            let rep = suite::run(&cfg, &Suite::ALL);
            println!("-- λ = {lambda}, n = {}", cfg.grid_n);
            for r in &rep.records {
                let c = r
                    .criterion
                    .map_or_else(|| String::from("  "), |c| format!("{c:>2}"));
                println!(
                    "   [{c}] {} {:<40} {:>10} {:?} {:.1e}  {}",
                    if r.pass { "pass" } else { "FAIL" },
                    r.name,
                    measured(r),
                    r.comparison,
                    r.tolerance,
                    r.detail
                );
            }
            rep
        })
        .collect();
    println!();
    let mut failed = Vec::new();
    for (k, title) in CRITERIA {
        let parts: Vec<(bool, String)> = reports.iter().map(|r| summary(r, k)).collect();
        let pass = parts.iter().all(|p| p.0);
        let detail: Vec<&str> = parts.iter().map(|p| p.1.as_str()).collect();
        println!(
            "{} criterion {k:>2}: {title}: {}",
            if pass { "PASS" } else { "FAIL" },
            detail.join("; ")
        );
        if !pass {
            failed.push(k);
        }
    }
    assert!(failed.is_empty(), "criteria failing: {failed:?}");
}
