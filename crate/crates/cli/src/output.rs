//! CSV/JSON rendering and atomic file output.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::config::Format;
use crate::error::CliError;
use crate::scenarios::ScenarioOutput;

fn out_err(e: impl std::fmt::Display) -> CliError {
    CliError::Output(e.to_string())
}

fn render_rows<T: Serialize>(rows: &[T], format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in rows {
                w.serialize(row).map_err(out_err)?;
            }
            w.into_inner().map_err(out_err)
        }
        Format::Json => {
            let mut buf = serde_json::to_vec_pretty(rows).map_err(out_err)?;
            buf.push(b'\n');
            Ok(buf)
        }
    }
}

pub fn render(output: &ScenarioOutput, format: Format) -> Result<Vec<u8>, CliError> {
    match output {
        ScenarioOutput::Sweep(r) => render_rows(r, format),
        ScenarioOutput::Readout(r) => render_rows(r, format),
        ScenarioOutput::Validation(r) => render_rows(r, format),
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(out_err)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(out_err)?;
    tmp.write_all(bytes).map_err(out_err)?;
    tmp.flush().map_err(out_err)?;
    tmp.persist(path).map_err(|e| out_err(e.error))?;
    Ok(())
}
