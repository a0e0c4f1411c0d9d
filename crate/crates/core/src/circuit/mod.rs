//! Two-qubit circuits: gates, simulation, simplification and a line-oriented
//! text format.
//!
//! Qubit 0 is the most significant bit of the basis index, so `|q0 q1>` with
//! `|01>` at index 1.

mod embed;
mod kak;
mod pipeline;

pub use embed::{embed_pmns, phase_matrix4, PhaseMatrix4, PhiAbPolicy, Pmns4};
pub use kak::{interaction_coefficients, synthesize, weyl_coordinates, KakDecomposition};
pub use pipeline::{pipeline_circuit, pipeline_unitary, run_pipeline, run_pipeline_with, Backend};

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::Vector4;

use crate::error::{OscError, Result};
use crate::linalg::{cis, kron, CMat2, CMat4, C64, ONE, ZERO};

/// Rotations below this magnitude are dropped by [`Circuit::simplify`].
pub const ANGLE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    Rx,
    Ry,
    Rz,
    Phase,
    Cnot,
}

impl GateKind {
    pub fn keyword(self) -> &'static str {
        match self {
            GateKind::Rx => "RX",
            GateKind::Ry => "RY",
            GateKind::Rz => "RZ",
            GateKind::Phase => "PHASE",
            GateKind::Cnot => "CNOT",
        }
    }
}

impl FromStr for GateKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "RX" => Ok(GateKind::Rx),
            "RY" => Ok(GateKind::Ry),
            "RZ" => Ok(GateKind::Rz),
            "PHASE" => Ok(GateKind::Phase),
            "CNOT" | "CX" => Ok(GateKind::Cnot),
            other => Err(format!("unknown gate kind `{other}`")),
        }
    }
}

/// A single gate. Rotations are `exp(-i θ P / 2)`; `Phase(θ) = diag(1, e^{iθ})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate {
    kind: GateKind,
    target: usize,
    control: Option<usize>,
    angle: f64,
}

impl Gate {
    fn rotation(kind: GateKind, qubit: usize, angle: f64) -> Self {
        Self {
            kind,
            target: qubit,
            control: None,
            angle,
        }
    }

    pub fn rx(qubit: usize, angle: f64) -> Self {
        Self::rotation(GateKind::Rx, qubit, angle)
    }

    pub fn ry(qubit: usize, angle: f64) -> Self {
        Self::rotation(GateKind::Ry, qubit, angle)
    }

    pub fn rz(qubit: usize, angle: f64) -> Self {
        Self::rotation(GateKind::Rz, qubit, angle)
    }

    pub fn phase(qubit: usize, angle: f64) -> Self {
        Self::rotation(GateKind::Phase, qubit, angle)
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self {
            kind: GateKind::Cnot,
            target,
            control: Some(control),
            angle: 0.0,
        }
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn control(&self) -> Option<usize> {
        self.control
    }

    /// Rotation angle in radians; zero for CNOT.
    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn is_rotation(&self) -> bool {
        self.kind != GateKind::Cnot
    }

    pub fn validate(&self) -> Result<()> {
        if self.target > 1 {
            return Err(OscError::InvalidGate("target qubit must be 0 or 1"));
        }
        match (self.kind, self.control) {
            (GateKind::Cnot, Some(c)) if c > 1 => {
                Err(OscError::InvalidGate("control qubit must be 0 or 1"))
            }
            (GateKind::Cnot, Some(c)) if c == self.target => {
                Err(OscError::InvalidGate("control and target must differ"))
            }
            (GateKind::Cnot, None) => Err(OscError::InvalidGate("CNOT needs a control")),
            (_, Some(_)) if self.kind != GateKind::Cnot => {
                Err(OscError::InvalidGate("rotations take no control"))
            }
            _ if !self.angle.is_finite() => Err(OscError::InvalidGate("angle must be finite")),
            _ => Ok(()),
        }
    }

    fn touches(&self, qubit: usize) -> bool {
        self.target == qubit || self.control == Some(qubit)
    }

    /// Inverse gate.
    pub fn inverse(&self) -> Self {
        Self {
            angle: -self.angle,
            ..*self
        }
    }

    /// 2×2 matrix of a rotation gate.
    pub fn local_matrix(&self) -> Option<CMat2> {
        let h = self.angle / 2.0;
        let (s, c) = h.sin_cos();
        let m = match self.kind {
            GateKind::Rx => CMat2::new(c.into(), C64::new(0.0, -s), C64::new(0.0, -s), c.into()),
            GateKind::Ry => CMat2::new(c.into(), (-s).into(), s.into(), c.into()),
            GateKind::Rz => CMat2::new(cis(-h), ZERO, ZERO, cis(h)),
            GateKind::Phase => CMat2::new(ONE, ZERO, ZERO, cis(self.angle)),
            GateKind::Cnot => return None,
        };
        Some(m)
    }

    /// Full 4×4 matrix.
    pub fn matrix(&self) -> CMat4 {
        match self.local_matrix() {
            Some(m) if self.target == 0 => kron(&m, &CMat2::identity()),
            Some(m) => kron(&CMat2::identity(), &m),
            None => {
                let control = self.control.unwrap_or(1 - self.target);
                let mut out = CMat4::zeros();
                for col in 0..4 {
                    let control_bit = (col >> (1 - control)) & 1;
                    let row = if control_bit == 1 {
                        col ^ (1 << (1 - self.target))
                    } else {
                        col
                    };
                    out[(row, col)] = ONE;
                }
                out
            }
        }
    }

    /// Applies the gate to a state vector amplitude by amplitude.
    pub fn apply(&self, state: &mut Vector4<C64>) {
        match self.local_matrix() {
            Some(m) => {
                let stride = 1 << (1 - self.target);
                for base in 0..4 {
                    if base & stride != 0 {
                        continue;
                    }
                    let (a0, a1) = (state[base], state[base | stride]);
                    state[base] = m[(0, 0)] * a0 + m[(0, 1)] * a1;
                    state[base | stride] = m[(1, 0)] * a0 + m[(1, 1)] * a1;
                }
            }
            None => {
                let cbit = 1 << (1 - self.control.unwrap_or(1 - self.target));
                let tbit = 1 << (1 - self.target);
                for idx in 0..4 {
                    if idx & cbit != 0 && idx & tbit == 0 {
                        state.swap_rows(idx, idx | tbit);
                    }
                }
            }
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.control {
            Some(c) => write!(f, "{} {} {}", self.kind.keyword(), self.target, c),
            None => write!(f, "{} {} {}", self.kind.keyword(), self.target, self.angle),
        }
    }
}

/// Wraps an angle into `(-π, π]`.
fn wrap_angle(theta: f64) -> f64 {
    let w = theta.rem_euclid(2.0 * PI);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}

/// Ordered gate list acting on two qubits.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Circuit {
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_gates(gates: impl IntoIterator<Item = Gate>) -> Result<Self> {
        let mut c = Self::new();
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate()?;
        self.gates.push(gate);
        Ok(())
    }

    /// Appends gates that are valid by construction.
    pub(crate) fn push_unchecked(&mut self, gate: Gate) {
        debug_assert!(gate.validate().is_ok());
        self.gates.push(gate);
    }

    pub fn extend(&mut self, other: &Circuit) {
        self.gates.extend_from_slice(&other.gates);
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn cnot_count(&self) -> usize {
        self.gates.iter().filter(|g| !g.is_rotation()).count()
    }

    pub fn rotation_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_rotation()).count()
    }

    /// Gate list reversed with every angle negated.
    pub fn inverse(&self) -> Self {
        Self {
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    /// `G_n ⋯ G_2 G_1`.
    pub fn unitary(&self) -> CMat4 {
        self.gates
            .iter()
            .fold(CMat4::identity(), |acc, g| g.matrix() * acc)
    }

    pub fn apply(&self, state: &Vector4<C64>) -> Vector4<C64> {
        let mut s = *state;
        for g in &self.gates {
            g.apply(&mut s);
        }
        s
    }

    /// Merges adjacent same-axis rotations, cancels adjacent identical CNOTs and
    /// drops rotations with `|angle| < ANGLE_EPS`. Angles are wrapped into
    /// `(-π, π]`; the result equals the input up to a global phase.
    pub fn simplify(&self) -> Self {
        let mut out: Vec<Gate> = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let mut g = *g;
            if g.is_rotation() {
                g.angle = wrap_angle(g.angle);
                if g.angle.abs() < ANGLE_EPS {
                    continue;
                }
            }
            let last = out
                .iter()
                .rposition(|p| p.touches(g.target) || g.control.is_some_and(|c| p.touches(c)));
            if let Some(j) = last {
                let prev = out[j];
                if g.is_rotation() && prev.kind == g.kind && prev.target == g.target {
                    let merged = wrap_angle(prev.angle + g.angle);
                    if merged.abs() < ANGLE_EPS {
                        out.remove(j);
                    } else {
                        out[j].angle = merged;
                    }
                    continue;
                }
                if !g.is_rotation()
                    && prev.kind == GateKind::Cnot
                    && prev.target == g.target
                    && prev.control == g.control
                {
                    out.remove(j);
                    continue;
                }
            }
            out.push(g);
        }
        Self { gates: out }
    }

    /// One gate per line: `KIND target [control] [angle_radians]`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for g in &self.gates {
            s.push_str(&g.to_string());
            s.push('\n');
        }
        s
    }

    /// Parses [`Circuit::to_text`] output. Blank lines and `#` comments are ignored.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut c = Self::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |reason: String| OscError::CircuitParse {
                line: n + 1,
                reason,
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let kind: GateKind = fields[0].parse().map_err(err)?;
            let qubit = |s: &str| {
                s.parse::<usize>()
                    .map_err(|e| err(format!("bad qubit `{s}`: {e}")))
            };
            if fields.len() != 3 {
                return Err(err(format!("expected 3 fields, got {}", fields.len())));
            }
            let gate = if kind == GateKind::Cnot {
                Gate::cnot(qubit(fields[2])?, qubit(fields[1])?)
            } else {
                let angle: f64 = fields[2]
                    .parse()
                    .map_err(|e| err(format!("bad angle `{}`: {e}", fields[2])))?;
                Gate::rotation(kind, qubit(fields[1])?, angle)
            };
            gate.validate().map_err(|e| err(e.to_string()))?;
            c.gates.push(gate);
        }
        Ok(c)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Convenience for [`Circuit::unitary`].
pub fn circuit_unitary(c: &Circuit) -> CMat4 {
    c.unitary()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, phase_aligned_distance, unitarity_residual};

    #[test]
    fn empty_circuit_is_identity() {
        assert_eq!(Circuit::new().unitary(), CMat4::identity());
    }

    #[test]
    fn inverse_rotation_pair_cancels() {
        let c = Circuit::from_gates([Gate::rz(1, 0.7), Gate::rz(1, -0.7)]).unwrap();
        assert!(max_abs(&(c.unitary() - CMat4::identity())) < 1e-15);
        assert!(c.simplify().is_empty());
    }

    #[test]
    fn cnot_matrix_layout() {
        // control 0 (MSB), target 1: |10> <-> |11>
        let m = Gate::cnot(0, 1).matrix();
        assert_eq!(m[(3, 2)], ONE);
        assert_eq!(m[(2, 3)], ONE);
        assert_eq!(m[(1, 1)], ONE);
        let m = Gate::cnot(1, 0).matrix();
        assert_eq!(m[(3, 1)], ONE);
        assert_eq!(m[(2, 2)], ONE);
    }

    #[test]
    fn gate_validation() {
        assert!(Gate::cnot(1, 1).validate().is_err());
        assert!(Gate::cnot(0, 2).validate().is_err());
        assert!(Gate::rx(2, 0.1).validate().is_err());
        assert!(Gate::rx(0, f64::NAN).validate().is_err());
        assert!(Circuit::from_gates([Gate::cnot(0, 0)]).is_err());
    }

    #[test]
    fn simplify_merges_across_other_qubit() {
        let c = Circuit::from_gates([
            Gate::rz(0, 0.3),
            Gate::ry(1, 0.2),
            Gate::rz(0, 0.4),
            Gate::cnot(0, 1),
            Gate::cnot(0, 1),
            Gate::rz(0, 1e-14),
        ])
        .unwrap();
        let s = c.simplify();
        assert_eq!(s.len(), 2);
        assert!((s.gates()[0].angle() - 0.7).abs() < 1e-15);
        assert!(phase_aligned_distance(&c.unitary(), &s.unitary()) < 1e-13);
    }

    #[test]
    fn simplify_keeps_global_phase_equivalence_on_wrap() {
        let c = Circuit::from_gates([Gate::rx(0, 3.0), Gate::rx(0, 3.5)]).unwrap();
        let s = c.simplify();
        assert!(phase_aligned_distance(&c.unitary(), &s.unitary()) < 1e-13);
        assert!(s.gates()[0].angle().abs() <= PI);
    }

    #[test]
    fn text_format_fields() {
        let c = Circuit::from_gates([Gate::rz(0, 0.1), Gate::cnot(0, 1)]).unwrap();
        assert_eq!(c.to_text(), "RZ 0 0.1\nCNOT 1 0\n");
        let back = Circuit::from_text("# header\nRZ 0 0.1\n\nCNOT 1 0 # tail\n").unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn text_format_errors() {
        assert!(Circuit::from_text("FOO 0 1").is_err());
        assert!(Circuit::from_text("RX 0").is_err());
        assert!(Circuit::from_text("RX 0 abc").is_err());
        assert!(Circuit::from_text("CNOT 1 1").is_err());
        assert!(Circuit::from_text("RX 5 0.2").is_err());
    }

    #[test]
    fn gate_matrices_are_unitary() {
        for g in [
            Gate::rx(0, 0.3),
            Gate::ry(1, -1.1),
            Gate::rz(0, 2.2),
            Gate::phase(1, 0.9),
            Gate::cnot(1, 0),
        ] {
            assert!(unitarity_residual(&g.matrix()) < 1e-15);
        }
    }
}
