//! The six scenarios. Each expands its configuration into an ordered task
//! list, evaluates the tasks on a worker pool and returns rows in task order.

use std::f64::consts::TAU;

use nuosc::circuit::{
    embed_pmns, pipeline_circuit, pipeline_unitary, run_pipeline_with, synthesize, Backend,
};
use nuosc::linalg::{phase_aligned_distance, CVec4, C64};
use nuosc::matter::{matter_propagation, MatterContext, MatterMode};
use nuosc::nmr::{
    extract_probabilities, noisy_readout, pps_to_pure, pseudo_pure, DensityMatrix, PpsParams,
};
use nuosc::vacuum::mass_phases;
use nuosc::{build_pmns, Baseline, Flavor, OscParams, PmnsMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Resolved, ScenarioKind};
use crate::error::CliError;

/// Conservation tolerance for noiseless rows.
pub const CONSERVATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub scenario: &'static str,
    pub backend: &'static str,
    pub mode: &'static str,
    pub initial: &'static str,
    pub x_kind: &'static str,
    pub x: f64,
    #[serde(rename = "V_eV")]
    pub v_ev: f64,
    pub delta_rad: f64,
    #[serde(rename = "P_e")]
    pub p_e: f64,
    #[serde(rename = "P_mu")]
    pub p_mu: f64,
    #[serde(rename = "P_tau")]
    pub p_tau: f64,
}

impl SweepRecord {
    pub fn probabilities(&self) -> [f64; 3] {
        [self.p_e, self.p_mu, self.p_tau]
    }
}

/// Readout row: recovered probabilities next to the simulated ones.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReadoutRecord {
    pub scenario: &'static str,
    pub backend: &'static str,
    pub mode: &'static str,
    pub initial: &'static str,
    pub x_kind: &'static str,
    pub x: f64,
    #[serde(rename = "V_eV")]
    pub v_ev: f64,
    pub delta_rad: f64,
    #[serde(rename = "P_e")]
    pub p_e: f64,
    #[serde(rename = "P_mu")]
    pub p_mu: f64,
    #[serde(rename = "P_tau")]
    pub p_tau: f64,
    #[serde(rename = "true_P_e")]
    pub true_p_e: f64,
    #[serde(rename = "true_P_mu")]
    pub true_p_mu: f64,
    #[serde(rename = "true_P_tau")]
    pub true_p_tau: f64,
    pub sigma: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationRecord {
    pub target: String,
    pub l_over_e: f64,
    pub cnot_u4: usize,
    pub cnot_u4_dagger: usize,
    pub cnot_total: usize,
    pub reconstruction_error: f64,
    pub backend_max_diff: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioOutput {
    Sweep(Vec<SweepRecord>),
    Readout(Vec<ReadoutRecord>),
    Validation(Vec<ValidationRecord>),
}

impl ScenarioOutput {
    pub fn len(&self) -> usize {
        match self {
            ScenarioOutput::Sweep(r) => r.len(),
            ScenarioOutput::Readout(r) => r.len(),
            ScenarioOutput::Validation(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn sweep(&self) -> Option<&[SweepRecord]> {
        match self {
            ScenarioOutput::Sweep(r) => Some(r),
            _ => None,
        }
    }
}

fn par_map<T, R, F>(workers: usize, tasks: &[T], f: F) -> Result<Vec<R>, CliError>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> Result<R, CliError> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| tasks.par_iter().enumerate().map(|(i, t)| f(i, t)).collect())
}

/// Mixing and mass phases for a point; `V = 0` is the vacuum in every mode.
fn propagation(
    r: &Resolved,
    params: &OscParams,
    length_km: f64,
    energy_gev: f64,
    v: f64,
    mode: MatterMode,
) -> Result<(PmnsMatrix, [f64; 3]), CliError> {
    if v == 0.0 {
        let b = Baseline::new(length_km, energy_gev)?;
        return Ok((build_pmns(params), mass_phases(params, &b)));
    }
    let ctx = MatterContext::with_convention(energy_gev, v, r.convention)?;
    let prop = matter_propagation(params, &ctx, length_km, mode)?;
    Ok((prop.mixing, prop.phases))
}

fn check_conservation(rows: &[SweepRecord]) -> Result<(), CliError> {
    for row in rows {
        if row.initial == Flavor::Sterile.name() {
            continue;
        }
        let s: f64 = row.probabilities().iter().sum();
        if (s - 1.0).abs() > CONSERVATION_TOLERANCE {
            return Err(CliError::Validation(format!(
                "{} {} -> sum {s} at x = {}",
                row.scenario, row.initial, row.x
            )));
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn record(
    kind: ScenarioKind,
    backend: Backend,
    mode: &'static str,
    initial: Flavor,
    x_kind: &'static str,
    x: f64,
    v: f64,
    delta: f64,
    p: [f64; 4],
) -> SweepRecord {
    SweepRecord {
        scenario: kind.id(),
        backend: backend.name(),
        mode,
        initial: initial.name(),
        x_kind,
        x,
        v_ev: v,
        delta_rad: delta,
        p_e: p[0],
        p_mu: p[1],
        p_tau: p[2],
    }
}

pub fn run_vacuum_sweep(r: &Resolved) -> Result<Vec<SweepRecord>, CliError> {
    let tasks: Vec<(Flavor, f64)> = r
        .initial
        .iter()
        .flat_map(|&f| r.grid.points().into_iter().map(move |x| (f, x)))
        .collect();
    let rows = par_map(r.workers, &tasks, |_, &(initial, x)| {
        let b = Baseline::from_l_over_e(x)?;
        let p = run_pipeline_with(
            &build_pmns(&r.params),
            mass_phases(&r.params, &b),
            initial,
            r.backend,
            r.policy,
        )?;
        Ok(record(
            r.kind,
            r.backend,
            "vacuum",
            initial,
            "L/E",
            x,
            0.0,
            r.params.delta,
            p,
        ))
    })?;
    check_conservation(&rows)?;
    Ok(rows)
}

pub fn run_matter_sweep(r: &Resolved) -> Result<Vec<SweepRecord>, CliError> {
    let mut tasks = Vec::new();
    for &mode in &r.modes {
        for &v in &r.potentials {
            for &initial in &r.initial {
                for x in r.grid.points() {
                    tasks.push((mode, v, initial, x));
                }
            }
        }
    }
    let e = r.energy_gev;
    let rows = par_map(r.workers, &tasks, |_, &(mode, v, initial, x)| {
        let (mix, phases) = propagation(r, &r.params, x * e, e, v, mode)?;
        let p = run_pipeline_with(&mix, phases, initial, r.backend, r.policy)?;
        Ok(record(
            r.kind,
            r.backend,
            mode.name(),
            initial,
            "L/E",
            x,
            v,
            r.params.delta,
            p,
        ))
    })?;
    check_conservation(&rows)?;
    Ok(rows)
}

pub fn run_dune_cp_scan(r: &Resolved) -> Result<Vec<SweepRecord>, CliError> {
    let tasks: Vec<(f64, f64)> = r
        .deltas
        .iter()
        .flat_map(|&d| r.grid.points().into_iter().map(move |e| (d, e)))
        .collect();
    let rows = par_map(r.workers, &tasks, |_, &(delta, e)| {
        let params = r.params.with_delta(delta);
        let b = Baseline::new(r.length_km, e)?;
        let p = run_pipeline_with(
            &build_pmns(&params),
            mass_phases(&params, &b),
            Flavor::Muon,
            r.backend,
            r.policy,
        )?;
        Ok(record(
            r.kind,
            r.backend,
            "vacuum",
            Flavor::Muon,
            "E",
            e,
            0.0,
            delta,
            p,
        ))
    })?;
    check_conservation(&rows)?;
    Ok(rows)
}

pub fn run_dune_matter_compare(r: &Resolved) -> Result<Vec<SweepRecord>, CliError> {
    let mode = r.modes[0];
    let mut tasks = Vec::new();
    for &v in &r.dune_potentials {
        for &d in &r.deltas {
            for e in r.grid.points() {
                tasks.push((v, d, e));
            }
        }
    }
    let rows = par_map(r.workers, &tasks, |_, &(v, delta, e)| {
        let params = r.params.with_delta(delta);
        let (mix, phases) = propagation(r, &params, r.length_km, e, v, mode)?;
        let p = run_pipeline_with(&mix, phases, Flavor::Muon, r.backend, r.policy)?;
        let tag = if v == 0.0 { "vacuum" } else { mode.name() };
        Ok(record(
            r.kind,
            r.backend,
            tag,
            Flavor::Muon,
            "E",
            e,
            v,
            delta,
            p,
        ))
    })?;
    check_conservation(&rows)?;
    Ok(rows)
}

fn random_params(rng: &mut ChaCha8Rng) -> OscParams {
    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    OscParams {
        theta12: rng.random_range(0.0..TAU),
        theta13: rng.random_range(0.0..TAU),
        theta23: rng.random_range(0.0..TAU),
        delta: rng.random_range(-TAU / 2.0..TAU / 2.0),
        dm2_21: rng.random_range(1e-6..1e-3),
        dm2_31: sign * rng.random_range(1e-4..5e-3),
        antineutrino: rng.random_bool(0.5),
    }
}

pub fn run_circuit_validate(r: &Resolved) -> Result<Vec<ValidationRecord>, CliError> {
    let mut tasks: Vec<(String, OscParams, f64)> = r
        .grid
        .points()
        .into_iter()
        .map(|x| ("defaults".to_owned(), r.params, x))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(r.seed);
    for i in 0..r.samples {
        let p = random_params(&mut rng);
        let x = rng.random_range(r.grid.min..r.grid.max);
        tasks.push((format!("random-{i}"), p, x));
    }

    let rows = par_map(r.workers, &tasks, |_, (name, params, x)| {
        let b = Baseline::from_l_over_e(*x)?;
        let mix = build_pmns(params);
        let phases = mass_phases(params, &b);
        let u4 = *embed_pmns(&mix).matrix();
        let fwd = synthesize(&u4)?;
        let adj = synthesize(&u4.adjoint())?;
        let circ = pipeline_circuit(&mix, phases, Flavor::Electron, r.policy)?;
        let error = phase_aligned_distance(&fwd.unitary(), &u4)
            .max(phase_aligned_distance(&adj.unitary(), &u4.adjoint()))
            .max(phase_aligned_distance(
                &circ.unitary(),
                &pipeline_unitary(&mix, phases, r.policy),
            ));

        let mut diff: f64 = 0.0;
        for initial in Flavor::ACTIVE {
            let reference =
                run_pipeline_with(&mix, phases, initial, Backend::ClosedForm, r.policy)?;
            for be in [Backend::Matrix4, Backend::Circuit] {
                let p = run_pipeline_with(&mix, phases, initial, be, r.policy)?;
                for k in 0..4 {
                    diff = diff.max((p[k] - reference[k]).abs());
                }
            }
        }
        Ok(ValidationRecord {
            target: name.clone(),
            l_over_e: *x,
            cnot_u4: fwd.cnot_count(),
            cnot_u4_dagger: adj.cnot_count(),
            cnot_total: circ.cnot_count(),
            reconstruction_error: error,
            backend_max_diff: diff,
        })
    })?;
    Ok(rows)
}

/// Rows that break the synthesis contract.
pub fn validation_failures(rows: &[ValidationRecord], tolerance: f64) -> Vec<&ValidationRecord> {
    rows.iter()
        .filter(|v| {
            v.cnot_u4 > 3
                || v.cnot_u4_dagger > 3
                || v.reconstruction_error.is_nan()
                || v.reconstruction_error > tolerance
                || v.backend_max_diff.is_nan()
                || v.backend_max_diff > tolerance
        })
        .collect()
}

pub fn run_readout_demo(r: &Resolved) -> Result<Vec<ReadoutRecord>, CliError> {
    let tasks: Vec<(Flavor, f64)> = r
        .initial
        .iter()
        .flat_map(|&f| r.grid.points().into_iter().map(move |x| (f, x)))
        .collect();
    let pps = PpsParams::new(r.eta)?;
    let rows = par_map(r.workers, &tasks, |i, &(initial, x)| {
        let b = Baseline::from_l_over_e(x)?;
        let mix = build_pmns(&r.params);
        let phases = mass_phases(&r.params, &b);
        let mut ket = CVec4::zeros();
        let psi = match r.backend {
            Backend::Circuit => {
                ket[0] = C64::new(1.0, 0.0);
                pipeline_circuit(&mix, phases, initial, r.policy)?.apply(&ket)
            }
            _ => {
                ket[initial.index()] = C64::new(1.0, 0.0);
                pipeline_unitary(&mix, phases, r.policy) * ket
            }
        };
        let truth = [0, 1, 2].map(|k| psi[k].norm_sqr());
        let rho = if r.eta == 1.0 {
            DensityMatrix::from_pure(&psi)?
        } else {
            pseudo_pure(&psi, pps)?
        };
        let readout = noisy_readout(&rho, r.sigma, r.seed.wrapping_add(i as u64))?;
        let raw = extract_probabilities(&readout).raw;
        let rec = if r.eta == 1.0 {
            raw
        } else {
            raw.map(|p| pps_to_pure(p, pps))
        };
        if r.sigma == 0.0 {
            let tol = 1e-12 / r.eta;
            for k in 0..3 {
                if (rec[k] - truth[k]).abs() > tol {
                    return Err(CliError::Validation(format!(
                        "readout mismatch at {} x = {x}: {} vs {}",
                        initial.name(),
                        rec[k],
                        truth[k]
                    )));
                }
            }
        }
        Ok(ReadoutRecord {
            scenario: r.kind.id(),
            backend: r.backend.name(),
            mode: "vacuum",
            initial: initial.name(),
            x_kind: "L/E",
            x,
            v_ev: 0.0,
            delta_rad: r.params.delta,
            p_e: rec[0],
            p_mu: rec[1],
            p_tau: rec[2],
            true_p_e: truth[0],
            true_p_mu: truth[1],
            true_p_tau: truth[2],
            sigma: r.sigma,
            eta: r.eta,
        })
    })?;
    Ok(rows)
}

pub fn run(r: &Resolved) -> Result<ScenarioOutput, CliError> {
    Ok(match r.kind {
        ScenarioKind::VacuumSweep => ScenarioOutput::Sweep(run_vacuum_sweep(r)?),
        ScenarioKind::MatterSweep => ScenarioOutput::Sweep(run_matter_sweep(r)?),
        ScenarioKind::DuneCpScan => ScenarioOutput::Sweep(run_dune_cp_scan(r)?),
        ScenarioKind::DuneMatterCompare => ScenarioOutput::Sweep(run_dune_matter_compare(r)?),
        ScenarioKind::CircuitValidate => ScenarioOutput::Validation(run_circuit_validate(r)?),
        ScenarioKind::ReadoutDemo => ScenarioOutput::Readout(run_readout_demo(r)?),
    })
}
