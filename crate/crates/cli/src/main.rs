use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ncg_cli::runner::{run_all, ReportRow, RunOptions};
use ncg_cli::scenario::{list_checks, parse};

/// Exit codes: 0 all checks passed, 1 a check failed, 2 bad input, 3 internal error.
#[derive(Parser)]
#[command(name = "ncg", version, about = "Run verification scenarios for spectral triples and quantum semigroups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write report.json plus CSV artifacts.
    Run {
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Scenarios run concurrently; defaults to the number of CPUs.
        #[arg(long)]
        jobs: Option<usize>,
        /// Multiplies every upper-bound tolerance.
        #[arg(long, default_value_t = 1.0)]
        tol_scale: f64,
    },
    /// Print every scenario kind with its checks and an example scenario.
    ListChecks,
}

const INPUT_ERROR: u8 = 2;
const INTERNAL_ERROR: u8 = 3;

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("ncg: {msg}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::ListChecks => {
            print!("{}", list_checks());
            ExitCode::SUCCESS
        }
        Command::Run {
            scenario,
            out,
            jobs,
            tol_scale,
        } => run(&scenario, &out, jobs, tol_scale),
    }
}

fn run(path: &Path, out: &Path, jobs: Option<usize>, tol_scale: f64) -> ExitCode {
    if !(tol_scale.is_finite() && tol_scale > 0.0) {
        return fail(INPUT_ERROR, format!("--tol-scale must be positive, got {tol_scale}"));
    }
    if jobs == Some(0) {
        return fail(INPUT_ERROR, "--jobs must be at least 1");
    }
    let seed_override = match std::env::var("NCG_SEED") {
        Ok(s) => match s.trim().parse::<u64>() {
            Ok(v) => Some(v),
            Err(_) => return fail(INPUT_ERROR, format!("NCG_SEED={s:?} is not a 64-bit unsigned integer")),
        },
        Err(_) => None,
    };
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return fail(INPUT_ERROR, format!("{}: {e}", path.display())),
    };
    let scenarios = match parse(&text) {
        Ok(s) => s,
        Err(e) => return fail(INPUT_ERROR, format!("{}: {e}", path.display())),
    };
    let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let opts = RunOptions {
        tol_scale,
        seed_override,
    };
    let outcomes = match run_all(&scenarios, &opts, jobs) {
        Ok(o) => o,
        Err((i, e)) => return fail(INTERNAL_ERROR, format!("scenario {i} ({}): {e}", scenarios[i].kind())),
    };
    let rows: Vec<&ReportRow> = outcomes.iter().flat_map(|o| &o.rows).collect();
    let write = || -> std::io::Result<()> {
        std::fs::create_dir_all(out)?;
        let report = serde_json::to_string_pretty(&rows).map_err(std::io::Error::other)?;
        std::fs::write(out.join("report.json"), report + "\n")?;
        for a in outcomes.iter().flat_map(|o| &o.artifacts) {
            std::fs::write(out.join(&a.file_name), &a.contents)?;
        }
        Ok(())
    };
    if let Err(e) = write() {
        return fail(INTERNAL_ERROR, format!("writing {}: {e}", out.display()));
    }
    let failed: Vec<&&ReportRow> = rows.iter().filter(|r| !r.passed).collect();
    for r in &failed {
        eprintln!(
            "FAIL {} (scenario {}): residual {:e}, tolerance {:e}",
            r.check_name, r.params["scenario"], r.residual, r.tolerance
        );
    }
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
