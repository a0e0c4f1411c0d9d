//! The lepton mixing matrix in the standard three-rotation parameterization.

use crate::linalg::{cis, CMat3, C64};
use crate::params::{Flavor, OscParams};

/// 3×3 unitary mixing matrix; rows are flavors (e, μ, τ), columns mass states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmnsMatrix {
    u: CMat3,
}

impl PmnsMatrix {
    /// Wraps an arbitrary 3×3 matrix. Callers are responsible for unitarity.
    pub fn from_matrix(u: CMat3) -> Self {
        Self { u }
    }

    pub fn matrix(&self) -> &CMat3 {
        &self.u
    }

    /// `U_{alpha, mass_state}` with `mass_state` in `0..3`.
    pub fn entry(&self, alpha: Flavor, mass_state: usize) -> C64 {
        self.u[(alpha.index(), mass_state)]
    }

    pub fn conjugate(&self) -> Self {
        Self {
            u: self.u.conjugate(),
        }
    }
}

/// `U = R23(θ23) · U13(θ13, δ) · R12(θ12)`, written out entry by entry.
pub fn pmns_from_angles(theta12: f64, theta13: f64, theta23: f64, delta: f64) -> PmnsMatrix {
    let (s12, c12) = theta12.sin_cos();
    let (s13, c13) = theta13.sin_cos();
    let (s23, c23) = theta23.sin_cos();
    let e_pos = cis(delta);
    let e_neg = cis(-delta);
    let r = |x: f64| C64::new(x, 0.0);

    let u = CMat3::new(
        r(c12 * c13),
        r(s12 * c13),
        e_neg * s13,
        // mu row
        r(-s12 * c23) - e_pos * (c12 * s23 * s13),
        r(c12 * c23) - e_pos * (s12 * s23 * s13),
        r(s23 * c13),
        // tau row
        r(s12 * s23) - e_pos * (c12 * c23 * s13),
        r(-c12 * s23) - e_pos * (s12 * c23 * s13),
        r(c23 * c13),
    );
    PmnsMatrix { u }
}

/// Mixing matrix for `params`, conjugated for antineutrinos.
pub fn build_pmns(params: &OscParams) -> PmnsMatrix {
    pmns_from_angles(
        params.theta12,
        params.theta13,
        params.theta23,
        params.effective_delta(),
    )
}
