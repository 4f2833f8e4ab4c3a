use std::path::Path;
use std::process::{Command, Output};

use sonine::commands::EfuncRecord;
use sonine::VerifyReport;

fn sonine(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sonine"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn efunc_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let args = ["efunc", "--grid", "96", "--w", "0.75,0.6+2i,0.3-1i,-0.5"];
    assert_eq!(code(&sonine(&args, &a)), 0);
    assert_eq!(code(&sonine(&args, &b)), 0);
    let ta = std::fs::read(a.join("efunc.json")).unwrap();
    assert_eq!(ta, std::fs::read(b.join("efunc.json")).unwrap());
    let recs: Vec<EfuncRecord> = serde_json::from_slice(&ta).unwrap();
    assert_eq!(recs.len(), 4);
    assert_eq!((recs[1].w_re, recs[1].w_im), (0.6, 2.0));
    assert!(recs[0].discrepancy.unwrap() < 1e-6);
    // Re w < 1/2 has only the mellin-tail route; Re w < 0 nothing
    assert!(recs[2].e_re.is_some() && recs[2].discrepancy.is_none());
    assert!(recs[3].e_re.is_none() && recs[3].error.is_some());
}

#[test]
fn empty_point_list_gives_empty_output() {
    let dir = tempfile::tempdir().unwrap();
    let o = sonine(
        &["efunc", "--grid", "32", "--w", "", "--format", "csv"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("efunc.csv")).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("w_re,w_im,E_re"));
}

#[test]
fn tight_tolerance_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let o = sonine(&["verify", "--suite", "prolate"], dir.path());
    assert_eq!(code(&o), 0);
    let o = sonine(
        &["verify", "--suite", "prolate", "--tol", "lemma=1e-15"],
        dir.path(),
    );
    assert_eq!(code(&o), 1);
    let rep: VerifyReport =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("verify.json")).unwrap())
            .unwrap();
    assert!(!rep.pass);
    assert!(rep
        .records
        .iter()
        .any(|r| r.name.starts_with("eigen-lift") && !r.pass));
}

#[test]
fn suite_filter_selects_records() {
    let dir = tempfile::tempdir().unwrap();
    let o = sonine(
        &[
            "verify", "--suite", "psi", "--grid", "128", "--format", "csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let text = std::fs::read_to_string(dir.path().join("verify.csv")).unwrap();
    let names: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert!(!names.is_empty());
    assert!(
        names
            .iter()
            .all(|n| n.starts_with("psi-") || n.starts_with("distribution-")),
        "{names:?}"
    );
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["project", "--input", r#"{"kind":"cube"}"#][..],
        &["project", "--input", "{"],
        &["psi", "--lambda", "-1"],
        &["efunc", "--w", "1+"],
        &["verify", "--suite", "nothing"],
        &["verify", "--tol", "unknown=1"],
        &["prolate", "--bogus"],
    ] {
        let o = sonine(args, dir.path());
        assert_eq!(
            code(&o),
            2,
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn zero_input_projects_to_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = sonine(
        &[
            "project",
            "--input",
            "zero",
            "--grid",
            "32",
            "--samples",
            "11",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("project.csv")).unwrap();
    for line in text.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(&v[1..], &[0.0, 0.0, 0.0]);
    }
}

#[test]
fn project_gaussian_at_lambda_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = sonine(
        &["project", "--input", "gaussian", "--lambda", "1"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let rep: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("project.json")).unwrap())
            .unwrap();
    let r = rep["r1"].as_f64().unwrap().max(rep["r2"].as_f64().unwrap());
    assert!(r <= 1e-7 * rep["norm_input"].as_f64().unwrap());
}

#[test]
fn prolate_eigenvalues_are_sorted() {
    let dir = tempfile::tempdir().unwrap();
    let o = sonine(&["prolate", "--lambda", "1"], dir.path());
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(dir.path().join("mu.csv")).unwrap();
    let mus: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(mus.len(), 400);
    assert!(mus.windows(2).all(|p| p[0].abs() >= p[1].abs()));
    let efuns = std::fs::read_to_string(dir.path().join("efuns.csv")).unwrap();
    assert_eq!(efuns.lines().next().unwrap().split(',').count(), 11);
}

#[test]
fn config_file_is_read_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "lambda = 0.7\ngrid = 48\nw = [\"0.8\"]\nformat = \"csv\"\n",
    )
    .unwrap();
    let o = sonine(
        &["efunc", "--config", cfg.to_str().unwrap(), "--w", "0.9,1.2"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("efunc.csv")).unwrap();
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn kernel_matrix_is_written_in_long_form() {
    let dir = tempfile::tempdir().unwrap();
    let o = sonine(
        &["kernel-matrix", "--kind", "d", "--grid", "16"],
        dir.path(),
    );
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(dir.path().join("d_matrix.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 16 * 16);
}
