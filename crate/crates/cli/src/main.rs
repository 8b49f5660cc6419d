use clap::{Parser, Subcommand};
use dephasing::exec::{set_jobs, Exec};
use dephasing_cli::commands::{self, Outcome, RunOptions};
use dephasing_cli::config::{self, ExperimentConfig};
use dephasing_cli::CliError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "dephasing", version, about = "Gate fidelity under nonclassical dephasing noise with resets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct Common {
    /// Experiment configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path; overrides `output` in the config. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 1 runs sequentially.
    #[arg(long)]
    jobs: Option<usize>,
    /// Relative quadrature tolerance (oracle-check: pass threshold on |dF|).
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Gate fidelity per sweep point.
    Fidelity(Common),
    /// Plateau limits, tail predictions and order-of-magnitude estimates.
    Asymptote(Common),
    /// Analytic fidelity against the truncated-bath simulation.
    OracleCheck(Common),
    /// Scan of the HF peak centre for the largest quantum phase.
    ResonanceScan(Common),
    /// Re-equilibration of post-reset bath means under idling.
    BathStats(Common),
}

fn load(path: &PathBuf) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    config::parse(&text)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (common, f): (Common, fn(&ExperimentConfig, RunOptions) -> Result<Outcome, CliError>) = match cli.command {
        Command::Fidelity(c) => (c, commands::run_fidelity),
        Command::Asymptote(c) => (c, commands::run_asymptote),
        Command::OracleCheck(c) => (c, commands::run_oracle_check),
        Command::ResonanceScan(c) => (c, commands::run_resonance_scan),
        Command::BathStats(c) => (c, commands::run_bath_stats),
    };
    if common.tol.is_some_and(|t| !(t > 0.0)) {
        return Err(CliError::Validation("--tol: must be positive".into()));
    }
    let exec = match common.jobs {
        Some(0) => return Err(CliError::Validation("--jobs: must be at least 1".into())),
        Some(1) => Exec::Sequential,
        Some(n) => {
            set_jobs(n);
            Exec::Parallel
        }
        None => Exec::Parallel,
    };
    let cfg = load(&common.config)?;
    let outcome = f(&cfg, RunOptions { exec, tol: common.tol })?;
    let text = outcome.table.render();
    match common.out.or_else(|| cfg.output.as_ref().map(PathBuf::from)) {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    outcome.failure.map_or(Ok(()), Err)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
