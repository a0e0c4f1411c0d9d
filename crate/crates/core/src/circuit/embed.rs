//! Embedding of the three-flavor problem into two qubits.
//!
//! νe → |00>, νμ → |01>, ντ → |10>, and the decoupled sterile state νχ → |11>.

use crate::linalg::{cis, diag4, kron, max_abs, CMat2, CMat4, C64, ONE, ZERO};
use crate::params::{oscillation_phase, Baseline, OscParams};
use crate::pmns::PmnsMatrix;

/// 4×4 mixing matrix with the sterile row and column fixed to `e4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pmns4 {
    u4: CMat4,
}

impl Pmns4 {
    pub fn matrix(&self) -> &CMat4 {
        &self.u4
    }
}

pub fn embed_pmns(u: &PmnsMatrix) -> Pmns4 {
    let mut u4 = CMat4::zeros();
    u4.fixed_view_mut::<3, 3>(0, 0).copy_from(u.matrix());
    u4[(3, 3)] = ONE;
    Pmns4 { u4 }
}

/// How the unobservable sterile phase `Φab` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum PhiAbPolicy {
    /// `Φab = φ21 + φ31`; the phase matrix then factorizes into two
    /// single-qubit phase gates.
    #[default]
    Sum,
    Fixed(f64),
}

/// `diag(1, e^{-iφ21}, e^{-iφ31}, e^{-iΦab})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseMatrix4 {
    phases: [f64; 4],
}

impl PhaseMatrix4 {
    pub fn from_phases(phi21: f64, phi31: f64, policy: PhiAbPolicy) -> Self {
        let phi_ab = match policy {
            PhiAbPolicy::Sum => phi21 + phi31,
            PhiAbPolicy::Fixed(p) => p,
        };
        Self {
            phases: [0.0, phi21, phi31, phi_ab],
        }
    }

    /// `(0, φ21, φ31, Φab)`.
    pub fn phases(&self) -> [f64; 4] {
        self.phases
    }

    pub fn entries(&self) -> [C64; 4] {
        self.phases.map(|p| cis(-p))
    }

    pub fn matrix(&self) -> CMat4 {
        diag4(self.entries())
    }

    /// Single-qubit factors `(qubit 0, qubit 1)` = `(diag(1, e^{-iφ31}), diag(1, e^{-iφ21}))`.
    pub fn single_qubit_factors(&self) -> (CMat2, CMat2) {
        let [_, phi21, phi31, _] = self.phases;
        (
            CMat2::new(ONE, ZERO, ZERO, cis(-phi31)),
            CMat2::new(ONE, ZERO, ZERO, cis(-phi21)),
        )
    }

    /// `max |M4 − q0 ⊗ q1|`; zero (to rounding) under [`PhiAbPolicy::Sum`].
    pub fn factorization_residual(&self) -> f64 {
        let (q0, q1) = self.single_qubit_factors();
        max_abs(&(self.matrix() - kron(&q0, &q1)))
    }

    /// Phase left over after the two single-qubit gates: `Φab − φ21 − φ31`.
    pub fn residual_phase(&self) -> f64 {
        self.phases[3] - self.phases[1] - self.phases[2]
    }
}

pub fn phase_matrix4(params: &OscParams, baseline: &Baseline, policy: PhiAbPolicy) -> PhaseMatrix4 {
    PhaseMatrix4::from_phases(
        oscillation_phase(params.dm2_21, baseline),
        oscillation_phase(params.dm2_31, baseline),
        policy,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unitarity_residual;
    use crate::pmns::build_pmns;

    #[test]
    fn identity_embeds_to_identity() {
        let u = PmnsMatrix::from_matrix(crate::linalg::CMat3::identity());
        assert_eq!(*embed_pmns(&u).matrix(), CMat4::identity());
    }

    #[test]
    fn sterile_block_is_exact() {
        let u4 = embed_pmns(&build_pmns(&OscParams::reference().with_delta(0.9)));
        let m = u4.matrix();
        for k in 0..3 {
            assert_eq!(m[(3, k)], ZERO);
            assert_eq!(m[(k, 3)], ZERO);
        }
        assert_eq!(m[(3, 3)], ONE);
        assert!(unitarity_residual(m) < 1e-15);
    }

    #[test]
    fn zero_baseline_phase_matrix_is_identity() {
        let b = Baseline::new(0.0, 1.0).unwrap();
        let m = phase_matrix4(&OscParams::reference(), &b, PhiAbPolicy::Sum);
        assert_eq!(m.matrix(), CMat4::identity());
    }

    #[test]
    fn fixed_policy_does_not_factorize() {
        let m = PhaseMatrix4::from_phases(0.4, 1.3, PhiAbPolicy::Fixed(0.0));
        assert!(m.factorization_residual() > 0.1);
        assert!((m.residual_phase() + 1.7).abs() < 1e-15);
    }
}
