//! Scenario configuration: a TOML file plus dotted `key=value` overrides.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use nuosc::circuit::{Backend, PhiAbPolicy};
use nuosc::matter::{MatterMode, PotentialConvention};
use nuosc::{Flavor, OscParams};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    VacuumSweep,
    MatterSweep,
    DuneCpScan,
    DuneMatterCompare,
    CircuitValidate,
    ReadoutDemo,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 6] = [
        ScenarioKind::VacuumSweep,
        ScenarioKind::MatterSweep,
        ScenarioKind::DuneCpScan,
        ScenarioKind::DuneMatterCompare,
        ScenarioKind::CircuitValidate,
        ScenarioKind::ReadoutDemo,
    ];

    pub fn id(self) -> &'static str {
        match self {
            ScenarioKind::VacuumSweep => "vacuum-sweep",
            ScenarioKind::MatterSweep => "matter-sweep",
            ScenarioKind::DuneCpScan => "dune-cp-scan",
            ScenarioKind::DuneMatterCompare => "dune-matter-compare",
            ScenarioKind::CircuitValidate => "circuit-validate",
            ScenarioKind::ReadoutDemo => "readout-demo",
        }
    }

    /// Energy sweeps for the long-baseline scenarios, L/E otherwise.
    fn default_grid(self) -> (f64, f64, usize) {
        match self {
            ScenarioKind::DuneCpScan | ScenarioKind::DuneMatterCompare => (0.5, 8.0, 200),
            _ => (0.0, 1600.0, 200),
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Mixing parameters; angles in degrees.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsConfig {
    pub theta12_deg: f64,
    pub theta13_deg: f64,
    pub theta23_deg: f64,
    pub delta_deg: f64,
    pub dm2_21: f64,
    pub dm2_31: f64,
    pub antineutrino: bool,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        let p = OscParams::reference();
        Self {
            theta12_deg: p.theta12.to_degrees(),
            theta13_deg: p.theta13.to_degrees(),
            theta23_deg: p.theta23.to_degrees(),
            delta_deg: p.delta.to_degrees(),
            dm2_21: p.dm2_21,
            dm2_31: p.dm2_31,
            antineutrino: false,
        }
    }
}

impl ParamsConfig {
    pub fn to_params(&self) -> Result<OscParams, CliError> {
        let p = OscParams::from_degrees(
            self.theta12_deg,
            self.theta13_deg,
            self.theta23_deg,
            self.delta_deg,
            self.dm2_21,
            self.dm2_31,
        )
        .map_err(|e| CliError::Config(format!("params: {e}")))?;
        Ok(p.with_antineutrino(self.antineutrino))
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        let span = self.max - self.min;
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| {
                if k + 1 == self.steps {
                    self.max
                } else {
                    self.min + span * k as f64 / last
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MatterConfig {
    pub energy_gev: f64,
    pub potentials_ev: Vec<f64>,
    pub modes: Vec<String>,
    pub convention: String,
}

impl Default for MatterConfig {
    fn default() -> Self {
        Self {
            energy_gev: 0.5,
            potentials_ev: vec![0.0, 5e-5, 1e-4],
            modes: vec!["approx".into()],
            convention: "operative".into(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DuneConfig {
    pub length_km: f64,
    pub deltas_deg: Option<Vec<f64>>,
    pub deltas_rad: Option<Vec<f64>>,
    pub potentials_ev: Vec<f64>,
}

impl Default for DuneConfig {
    fn default() -> Self {
        Self {
            length_km: 1285.0,
            deltas_deg: None,
            deltas_rad: None,
            potentials_ev: vec![0.0, 1e-4],
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Defaults to closed-form, or circuit for readout-demo.
    pub backend: Option<String>,
    pub initial: Vec<String>,
    /// Zero means one worker per available core.
    pub workers: usize,
    pub seed: u64,
    /// `"sum"` or a fixed phase in radians.
    pub phi_ab: toml::Value,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            backend: None,
            initial: vec!["e".into(), "mu".into(), "tau".into()],
            workers: 0,
            seed: 2024,
            phi_ab: toml::Value::String("sum".into()),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValidateConfig {
    pub samples: usize,
    pub tolerance: f64,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        Self {
            samples: 100,
            tolerance: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReadoutConfig {
    pub sigma: f64,
    pub eta: f64,
}

impl Default for ReadoutConfig {
    fn default() -> Self {
        Self {
            sigma: 0.0,
            eta: 1.0,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

/// Raw configuration as read from disk.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub scenario: Option<ScenarioKind>,
    pub params: ParamsConfig,
    pub grid: GridConfig,
    pub matter: MatterConfig,
    pub dune: DuneConfig,
    pub run: RunConfig,
    pub validate: ValidateConfig,
    pub readout: ReadoutConfig,
    pub output: OutputConfig,
}

fn parse_override(item: &str) -> Result<(Vec<String>, toml::Value), CliError> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{item}` is not key=value")))?;
    let path: Vec<String> = key.trim().split('.').map(str::to_owned).collect();
    if path.iter().any(String::is_empty) {
        return Err(CliError::Config(format!("bad override key `{key}`")));
    }
    let raw = raw.trim();
    let value = raw
        .parse::<toml::Value>()
        .unwrap_or_else(|_| toml::Value::String(raw.to_owned()));
    Ok((path, value))
}

fn apply_override(
    table: &mut toml::Table,
    path: &[String],
    value: toml::Value,
) -> Result<(), CliError> {
    let (last, parents) = path.split_last().expect("non-empty path");
    let mut cur = table;
    for p in parents {
        let entry = cur
            .entry(p.clone())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Config(format!("`{p}` is not a table")))?;
    }
    cur.insert(last.clone(), value);
    Ok(())
}

impl ScenarioConfig {
    pub fn from_toml(text: &str, overrides: &[String]) -> Result<Self, CliError> {
        let mut table: toml::Table =
            toml::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))?;
        for item in overrides {
            let (path, value) = parse_override(item)?;
            apply_override(&mut table, &path, value)?;
        }
        table
            .try_into()
            .map_err(|e| CliError::Config(format!("config: {e}")))
    }

    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?,
            None => String::new(),
        };
        Self::from_toml(&text, overrides)
    }

    pub fn resolve(&self, kind: ScenarioKind) -> Result<Resolved, CliError> {
        let cfg_err = |m: String| CliError::Config(m);
        let params = self.params.to_params()?;

        let (dmin, dmax, dsteps) = kind.default_grid();
        let grid = Grid {
            min: self.grid.min.unwrap_or(dmin),
            max: self.grid.max.unwrap_or(dmax),
            steps: self.grid.steps.unwrap_or(dsteps),
        };
        if !(grid.min.is_finite() && grid.max.is_finite()) || grid.min >= grid.max {
            return Err(cfg_err(format!(
                "grid needs min < max, got [{}, {}]",
                grid.min, grid.max
            )));
        }
        if grid.steps < 2 {
            return Err(cfg_err(format!(
                "grid needs at least 2 steps, got {}",
                grid.steps
            )));
        }
        let energy_axis = matches!(
            kind,
            ScenarioKind::DuneCpScan | ScenarioKind::DuneMatterCompare
        );
        if energy_axis && grid.min <= 0.0 {
            return Err(cfg_err("energy grid must be positive".into()));
        }
        if !energy_axis && grid.min < 0.0 {
            return Err(cfg_err("L/E grid must be non-negative".into()));
        }

        let backend: Backend = match &self.run.backend {
            Some(b) => b.parse().map_err(cfg_err)?,
            None if kind == ScenarioKind::ReadoutDemo => Backend::Circuit,
            None => Backend::ClosedForm,
        };
        let initial = self
            .run
            .initial
            .iter()
            .map(|s| s.parse::<Flavor>().map_err(cfg_err))
            .collect::<Result<Vec<_>, _>>()?;
        if initial.is_empty() {
            return Err(cfg_err("run.initial is empty".into()));
        }
        if backend == Backend::ClosedForm && initial.contains(&Flavor::Sterile) {
            return Err(cfg_err(
                "the closed-form backend has no sterile state".into(),
            ));
        }
        let policy = match &self.run.phi_ab {
            toml::Value::String(s) if s == "sum" => PhiAbPolicy::Sum,
            toml::Value::Float(x) => PhiAbPolicy::Fixed(*x),
            toml::Value::Integer(x) => PhiAbPolicy::Fixed(*x as f64),
            other => {
                return Err(cfg_err(format!(
                    "run.phi_ab must be \"sum\" or a number, got {other}"
                )))
            }
        };

        let modes = self
            .matter
            .modes
            .iter()
            .map(|s| s.parse::<MatterMode>().map_err(cfg_err))
            .collect::<Result<Vec<_>, _>>()?;
        if modes.is_empty() {
            return Err(cfg_err("matter.modes is empty".into()));
        }
        let convention: PotentialConvention = self.matter.convention.parse().map_err(cfg_err)?;
        if !(self.matter.energy_gev > 0.0 && self.matter.energy_gev.is_finite()) {
            return Err(cfg_err("matter.energy_gev must be positive".into()));
        }
        for v in self
            .matter
            .potentials_ev
            .iter()
            .chain(&self.dune.potentials_ev)
        {
            if !(v.is_finite() && *v >= 0.0) {
                return Err(cfg_err(format!("potentials must be non-negative, got {v}")));
            }
        }
        if self.matter.potentials_ev.is_empty() || self.dune.potentials_ev.is_empty() {
            return Err(cfg_err("potential lists must be non-empty".into()));
        }
        if !(self.dune.length_km >= 0.0 && self.dune.length_km.is_finite()) {
            return Err(cfg_err("dune.length_km must be non-negative".into()));
        }

        let deltas = match (&self.dune.deltas_deg, &self.dune.deltas_rad) {
            (Some(_), Some(_)) => {
                return Err(cfg_err(
                    "set dune.deltas_deg or dune.deltas_rad, not both".into(),
                ))
            }
            (Some(d), None) => d.iter().map(|x| x.to_radians()).collect(),
            (None, Some(r)) => r.clone(),
            (None, None) => match kind {
                ScenarioKind::DuneMatterCompare => vec![0.0, -std::f64::consts::FRAC_PI_2],
                _ => {
                    use std::f64::consts::{FRAC_PI_2, PI};
                    vec![0.0, FRAC_PI_2, PI, -FRAC_PI_2]
                }
            },
        };
        if deltas.is_empty() || deltas.iter().any(|d: &f64| !d.is_finite()) {
            return Err(cfg_err("delta list must be non-empty and finite".into()));
        }

        if !(self.readout.sigma >= 0.0 && self.readout.sigma.is_finite()) {
            return Err(cfg_err(format!(
                "readout.sigma must be >= 0, got {}",
                self.readout.sigma
            )));
        }
        if !(self.readout.eta > 0.0 && self.readout.eta <= 1.0) {
            return Err(cfg_err(format!(
                "readout.eta must lie in (0, 1], got {}",
                self.readout.eta
            )));
        }
        if kind == ScenarioKind::ReadoutDemo && backend == Backend::ClosedForm {
            return Err(cfg_err(
                "readout-demo needs a state vector: use the matrix4 or circuit backend".into(),
            ));
        }
        if self.validate.tolerance.is_nan() || self.validate.tolerance <= 0.0 {
            return Err(cfg_err("validate.tolerance must be positive".into()));
        }

        Ok(Resolved {
            kind,
            params,
            grid,
            backend,
            initial,
            policy,
            workers: self.run.workers,
            seed: self.run.seed,
            energy_gev: self.matter.energy_gev,
            potentials: self.matter.potentials_ev.clone(),
            modes,
            convention,
            length_km: self.dune.length_km,
            deltas,
            dune_potentials: self.dune.potentials_ev.clone(),
            samples: self.validate.samples,
            tolerance: self.validate.tolerance,
            sigma: self.readout.sigma,
            eta: self.readout.eta,
        })
    }
}

/// Validated, fully defaulted settings for one scenario run.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub kind: ScenarioKind,
    pub params: OscParams,
    pub grid: Grid,
    pub backend: Backend,
    pub initial: Vec<Flavor>,
    pub policy: PhiAbPolicy,
    pub workers: usize,
    pub seed: u64,
    pub energy_gev: f64,
    pub potentials: Vec<f64>,
    pub modes: Vec<MatterMode>,
    pub convention: PotentialConvention,
    pub length_km: f64,
    pub deltas: Vec<f64>,
    pub dune_potentials: Vec<f64>,
    pub samples: usize,
    pub tolerance: f64,
    pub sigma: f64,
    pub eta: f64,
}
