use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use nuosc_cli::{execute, output, CliError, Format, ScenarioConfig, ScenarioKind};

/// Run a neutrino oscillation scenario and write its rows as CSV or JSON.
#[derive(Debug, Parser)]
#[command(name = "nuosc", version)]
struct Args {
    /// Scenario to run; may instead come from `scenario = ...` in the config.
    #[arg(value_enum)]
    scenario: Option<ScenarioKind>,

    /// TOML configuration file.
    #[arg(short, long)]
    config: Option<PathBuf>,

    /// Override a config key, e.g. `--set run.backend=circuit`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    /// Output file; stdout when absent.
    #[arg(short, long)]
    out: Option<PathBuf>,

    #[arg(short, long, value_enum)]
    format: Option<Format>,

    /// Worker threads, 0 for one per core.
    #[arg(short, long)]
    workers: Option<usize>,
}

fn run(args: Args) -> Result<(), CliError> {
    let mut overrides = args.overrides;
    if let Some(w) = args.workers {
        overrides.push(format!("run.workers={w}"));
    }
    let cfg = ScenarioConfig::load(args.config.as_deref(), &overrides)?;
    let report = execute(args.scenario, &cfg, args.format, args.out)?;
    match &report.path {
        Some(p) => output::write_atomic(p, &report.bytes)?,
        None => std::io::stdout()
            .write_all(&report.bytes)
            .map_err(|e| CliError::Output(e.to_string()))?,
    }
    eprintln!("{} rows", report.output.len());
    match report.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nuosc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
