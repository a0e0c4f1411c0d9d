//! Scenario runner behind the `nuosc` binary.

pub mod config;
pub mod error;
pub mod output;
pub mod scenarios;

use std::path::PathBuf;

pub use config::{Format, Resolved, ScenarioConfig, ScenarioKind};
pub use error::CliError;
pub use scenarios::ScenarioOutput;

/// Result of a finished scenario: rendered bytes and where they go.
#[derive(Debug)]
pub struct Report {
    pub output: ScenarioOutput,
    pub bytes: Vec<u8>,
    pub path: Option<PathBuf>,
    /// Set when the run completed but its own checks failed.
    pub failure: Option<CliError>,
}

/// Resolves the configuration, runs the scenario and renders the rows.
pub fn execute(
    kind: Option<ScenarioKind>,
    cfg: &ScenarioConfig,
    format: Option<Format>,
    out: Option<PathBuf>,
) -> Result<Report, CliError> {
    let kind = kind.or(cfg.scenario).ok_or_else(|| {
        CliError::Config("no scenario given on the command line or in the config".into())
    })?;
    let resolved = cfg.resolve(kind)?;
    let output = scenarios::run(&resolved)?;
    let format = format.or(cfg.output.format).unwrap_or_default();
    let bytes = output::render(&output, format)?;

    let failure = match &output {
        ScenarioOutput::Validation(rows) => {
            let bad = scenarios::validation_failures(rows, resolved.tolerance);
            bad.first().map(|v| {
                CliError::Validation(format!(
                    "{} of {} targets failed; first {}: error {:e}, diff {:e}, cnots {}/{}",
                    bad.len(),
                    rows.len(),
                    v.target,
                    v.reconstruction_error,
                    v.backend_max_diff,
                    v.cnot_u4,
                    v.cnot_u4_dagger
                ))
            })
        }
        _ => None,
    };
    Ok(Report {
        output,
        bytes,
        path: out.or_else(|| cfg.output.path.clone()),
        failure,
    })
}
