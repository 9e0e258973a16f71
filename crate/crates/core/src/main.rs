use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use nsk_core::config::{parse_config, ScenarioSpec};
use nsk_core::output::{ledger_to_gnuplot, resolve_dir, RunWriter};
use nsk_core::solver::RunError;
use nsk_core::suites::{run_suite, SUITES};

const EXIT_INVALID: u8 = 1;
const EXIT_BLOWUP: u8 = 2;

#[derive(Parser)]
#[command(name = "nsk", version, about = "Nonlocal Navier–Stokes–Korteweg simulator on periodic grids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its artifacts.
    Run { config: PathBuf },
    /// Validate a config without running it.
    Check { config: PathBuf },
    /// Run a brute-force oracle suite, or `all`.
    Oracle { suite: String },
    /// Convert a ledger CSV to a gnuplot data file.
    LedgerPlot {
        csv: PathBuf,
        /// Defaults to the input path with a `.dat` extension.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// A failure with its exit code; the message goes to stderr.
struct Failure(u8, String);

fn load(path: &Path) -> Result<ScenarioSpec, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure(EXIT_INVALID, format!("{}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| Failure(EXIT_INVALID, format!("{}: {e}", path.display())))
}

fn invalid(e: impl std::fmt::Display) -> Failure {
    Failure(EXIT_INVALID, e.to_string())
}

fn check(path: &Path) -> Result<(), Failure> {
    let spec = load(path)?;
    // Building everything catches cross-section problems the parser cannot see.
    spec.solver().map_err(invalid)?;
    spec.initial_state().map_err(invalid)?;
    eprintln!("{}: ok (scenario `{}`)", path.display(), spec.name);
    Ok(())
}

fn run(path: &Path) -> Result<(), Failure> {
    let spec = load(path)?;
    let solver = spec.solver().map_err(invalid)?;
    let initial = spec.initial_state().map_err(invalid)?;
    let out = &spec.config.output;
    let writer = RunWriter::create(resolve_dir(&out.dir), out.format).map_err(invalid)?;
    writer.write_config(&spec).map_err(invalid)?;
    let rho_max = initial.rho.max().max(1.0) * 1.5;
    writer.write_split(solver.params().law(), rho_max).map_err(invalid)?;

    let start = Instant::now();
    let outcome = match solver.run(initial, &spec.control(), &spec.config.diagnostics) {
        Ok(o) => o,
        Err(RunError::BlowUp { step, t, cell, last_good }) => {
            let msg = format!("blow-up at step {step} (t = {t:e}): non-finite value at cell {cell}");
            return Err(match writer.write_state("last_good", &last_good) {
                Ok(p) => Failure(EXIT_BLOWUP, format!("{msg}; last good state written to {}", p.display())),
                Err(e) => Failure(EXIT_BLOWUP, format!("{msg}; writing last good state failed: {e}")),
            });
        }
        Err(e @ RunError::StepLimit { .. }) => return Err(Failure(EXIT_BLOWUP, e.to_string())),
        Err(e) => return Err(invalid(e)),
    };
    let runtime = start.elapsed();
    writer.write_text("ledger.csv", &outcome.ledger.to_csv()).map_err(invalid)?;
    for (step, state) in &outcome.snapshots {
        writer.write_state(&format!("snap_{step}"), state).map_err(invalid)?;
    }
    writer
        .write_effective_flux(&solver, &outcome.final_state)
        .map_err(invalid)?;
    eprintln!(
        "{}: {} steps to t = {} in {:.2}s, artifacts in {}",
        spec.name,
        outcome.steps,
        outcome.final_state.t,
        runtime.as_secs_f64(),
        writer.dir().display()
    );
    Ok(())
}

fn oracle(suite: &str) -> Result<(), Failure> {
    let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite] };
    let mut failed = Vec::new();
    for name in names {
        let report = run_suite(name).map_err(invalid)?;
        println!("{}\n", report.table());
        if !report.passed() {
            failed.push(name);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure(EXIT_INVALID, format!("oracle failures in: {}", failed.join(", "))))
    }
}

fn ledger_plot(csv: &Path, output: Option<PathBuf>) -> Result<(), Failure> {
    let text = fs::read_to_string(csv).map_err(|e| invalid(format!("{}: {e}", csv.display())))?;
    let data = ledger_to_gnuplot(&text).map_err(|e| invalid(format!("{}: {e}", csv.display())))?;
    let target = output.unwrap_or_else(|| csv.with_extension("dat"));
    fs::write(&target, data).map_err(|e| invalid(format!("{}: {e}", target.display())))?;
    eprintln!("wrote {}", target.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config } => run(&config),
        Command::Check { config } => check(&config),
        Command::Oracle { suite } => oracle(&suite),
        Command::LedgerPlot { csv, output } => ledger_plot(&csv, output),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
