use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sonine::commands::{self, MatrixKind};
use sonine::config::{Format, Overrides, RunConfig};
use sonine::suite::Suite;
use sonine::CliError;

/// Prolate bases, Sonine projections and the de Branges functions `E_λ`.
#[derive(Debug, Parser)]
#[command(name = "sonine", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    lambda: Option<f64>,
    /// Number of Gauss–Legendre nodes on (0, λ).
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Fixed truncation point for outer integrals.
    #[arg(long = "t-out", global = true)]
    t_out: Option<f64>,
    /// Comma-separated spectral points such as `0.75,0.6+2i`; empty for none.
    #[arg(long, global = true, allow_hyphen_values = true)]
    w: Option<String>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Tolerance override `name=value`, repeatable.
    #[arg(long = "tol", global = true)]
    tol: Vec<String>,
    /// Comma-separated suites for `verify`, or `all`.
    #[arg(long, global = true, default_value = "all")]
    suite: String,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Eigenvalues and leading eigenfunctions of the truncated cosine transform.
    Prolate {
        #[arg(long, default_value_t = 10)]
        modes: usize,
    },
    /// Orthogonal projection of one function onto the Sonine space.
    Project {
        /// Corpus name, inline JSON such as `{"kind":"gaussian","alpha":2}`, or a JSON file.
        #[arg(long)]
        input: String,
        #[arg(long, default_value_t = 401)]
        samples: usize,
    },
    /// The functions ψ_± on [0, 3λ].
    Psi {
        #[arg(long, default_value_t = 301)]
        points: usize,
    },
    /// E, A and B at the configured points.
    Efunc,
    /// Nyström matrix of F_λ or D_λ.
    KernelMatrix {
        #[arg(long, value_enum, default_value = "f")]
        kind: MatrixKind,
    },
    /// Run verification suites; exits 1 when any check fails.
    Verify,
}

fn print_paths(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let g = cli.global;
    let flags = Overrides {
        lambda: g.lambda,
        grid: g.grid,
        t_out: g.t_out,
        w: g.w,
        out: g.out,
        format: g.format,
        tolerances: g.tol,
    };
    let cfg = RunConfig::resolve(g.config.as_deref(), &flags)?;
    match cli.command {
        Command::Prolate { modes } => print_paths(&commands::prolate(&cfg, modes)?),
        Command::Project { input, samples } => {
            let (report, paths) = commands::project_command(&cfg, &input, samples)?;
            print_paths(&paths);
            println!(
                "{} r1 = {:.3e} r2 = {:.3e} |f| = {:.6e}",
                if report.pass { "PASS" } else { "FAIL" },
                report.r1,
                report.r2,
                report.norm_input
            );
            return Ok(report.pass);
        }
        Command::Psi { points } => print_paths(&commands::psi(&cfg, points)?),
        Command::Efunc => {
            let (records, path) = commands::efunc(&cfg)?;
            print_paths(&[path]);
            let failed = records.iter().filter(|r| r.e_re.is_none()).count();
            if failed > 0 {
                eprintln!(
                    "{failed} of {} points could not be evaluated",
                    records.len()
                );
            }
        }
        Command::KernelMatrix { kind } => print_paths(&[commands::kernel_matrix(&cfg, kind)?]),
        Command::Verify => {
            let suites = Suite::parse_list(&g.suite)?;
            let (report, path) = commands::verify(&cfg, &suites)?;
            for r in &report.records {
                let measured = r
                    .measured
                    .map_or_else(|| String::from("-"), |m| format!("{m:.3e}"));
                println!(
                    "{} {:<44} {measured:>10} (tol {:.1e})",
                    if r.pass { "PASS" } else { "FAIL" },
                    r.name,
                    r.tolerance
                );
            }
            print_paths(&[path]);
            return Ok(report.pass);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
