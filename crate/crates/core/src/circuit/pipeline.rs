//! End-to-end propagation on two qubits: prepare the flavor state, rotate to
//! mass states, apply the phases and rotate back.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::Vector4;

use super::embed::{embed_pmns, PhaseMatrix4, PhiAbPolicy};
use super::kak::synthesize;
use super::{Circuit, Gate, ANGLE_EPS};
use crate::error::{OscError, Result};
use crate::linalg::{CMat4, C64, ZERO};
use crate::params::{Baseline, Flavor, OscParams};
use crate::pmns::{build_pmns, PmnsMatrix};
use crate::vacuum::{clamp_probability, closed_form_from_mixing, mass_phases};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Backend {
    /// Three-flavor double sum; the sterile probability is zero by construction.
    ClosedForm,
    /// Dense `U4 · M4 · U4†` applied to the basis state.
    Matrix4,
    /// Synthesized gate sequence, simulated gate by gate.
    #[default]
    Circuit,
}

impl Backend {
    pub const ALL: [Backend; 3] = [Backend::ClosedForm, Backend::Matrix4, Backend::Circuit];

    pub fn name(self) -> &'static str {
        match self {
            Backend::ClosedForm => "closed-form",
            Backend::Matrix4 => "matrix4",
            Backend::Circuit => "circuit",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "closed-form" | "closed_form" | "closed" => Ok(Backend::ClosedForm),
            "matrix4" | "matrix" => Ok(Backend::Matrix4),
            "circuit" => Ok(Backend::Circuit),
            other => Err(format!("unknown backend `{other}`")),
        }
    }
}

/// `U4 · M4 · U4†`.
pub fn pipeline_unitary(mixing: &PmnsMatrix, phases: [f64; 3], policy: PhiAbPolicy) -> CMat4 {
    let u4 = *embed_pmns(mixing).matrix();
    let m4 =
        PhaseMatrix4::from_phases(phases[1] - phases[0], phases[2] - phases[0], policy).matrix();
    u4 * m4 * u4.adjoint()
}

fn preparation(initial: Flavor) -> Circuit {
    let idx = initial.index();
    let mut c = Circuit::new();
    if idx & 0b10 != 0 {
        c.push_unchecked(Gate::rx(0, PI));
    }
    if idx & 0b01 != 0 {
        c.push_unchecked(Gate::rx(1, PI));
    }
    c
}

/// Controlled phase `diag(1, 1, 1, e^{iθ})`.
fn controlled_phase(theta: f64) -> Circuit {
    let mut c = Circuit::new();
    c.push_unchecked(Gate::phase(0, theta / 2.0));
    c.push_unchecked(Gate::cnot(0, 1));
    c.push_unchecked(Gate::phase(1, -theta / 2.0));
    c.push_unchecked(Gate::cnot(0, 1));
    c.push_unchecked(Gate::phase(1, theta / 2.0));
    c
}

/// Full circuit: state preparation, `U4†`, phase gates, `U4`.
pub fn pipeline_circuit(
    mixing: &PmnsMatrix,
    phases: [f64; 3],
    initial: Flavor,
    policy: PhiAbPolicy,
) -> Result<Circuit> {
    let u4 = *embed_pmns(mixing).matrix();
    let pm = PhaseMatrix4::from_phases(phases[1] - phases[0], phases[2] - phases[0], policy);
    let [_, phi21, phi31, _] = pm.phases();

    let mut c = preparation(initial);
    c.extend(&synthesize(&u4.adjoint())?);
    c.push_unchecked(Gate::phase(0, -phi31));
    c.push_unchecked(Gate::phase(1, -phi21));
    let residual = pm.residual_phase();
    if residual.abs() > ANGLE_EPS {
        c.extend(&controlled_phase(-residual));
    }
    c.extend(&synthesize(&u4)?);
    Ok(c)
}

fn basis_state(initial: Flavor) -> Vector4<C64> {
    let mut v = Vector4::from_element(ZERO);
    v[initial.index()] = C64::new(1.0, 0.0);
    v
}

fn probabilities(state: &Vector4<C64>) -> Result<[f64; 4]> {
    let mut out = [0.0; 4];
    for (k, p) in out.iter_mut().enumerate() {
        *p = clamp_probability(state[k].norm_sqr())?;
    }
    Ok(out)
}

/// Output probabilities `(e, μ, τ, χ)` for arbitrary mixing and mass phases.
pub fn run_pipeline_with(
    mixing: &PmnsMatrix,
    phases: [f64; 3],
    initial: Flavor,
    backend: Backend,
    policy: PhiAbPolicy,
) -> Result<[f64; 4]> {
    match backend {
        Backend::ClosedForm => {
            if initial == Flavor::Sterile {
                return Err(OscError::SterileFlavor(initial.name()));
            }
            let mut out = [0.0; 4];
            for beta in Flavor::ACTIVE {
                out[beta.index()] = closed_form_from_mixing(mixing, phases, initial, beta)?;
            }
            Ok(out)
        }
        Backend::Matrix4 => {
            let s = pipeline_unitary(mixing, phases, policy);
            probabilities(&(s * basis_state(initial)))
        }
        Backend::Circuit => {
            let c = pipeline_circuit(mixing, phases, initial, policy)?;
            // Preparation is part of the circuit, so it always starts from |00>.
            probabilities(&c.apply(&basis_state(Flavor::Electron)))
        }
    }
}

/// Vacuum probabilities `(e, μ, τ, χ)` from `initial` over `baseline`.
pub fn run_pipeline(
    params: &OscParams,
    baseline: &Baseline,
    initial: Flavor,
    backend: Backend,
    policy: PhiAbPolicy,
) -> Result<[f64; 4]> {
    params.validate()?;
    run_pipeline_with(
        &build_pmns(params),
        mass_phases(params, baseline),
        initial,
        backend,
        policy,
    )
}
