//! NMR measurement chain: pseudo-pure states, fidelity, the two acquisition
//! pulses and recovery of the diagonal from absorption-mode line intensities.
//!
//! With `Ry(π/2) = [[1, -1], [1, 1]] / √2` acting on qubit 0,
//!
//! ```text
//! Re ρ¹(0,2) = (ρ00 − ρ22)/2 + Re(ρ02 − ρ20)/2 = (ρ00 − ρ22)/2
//! ```
//!
//! because `ρ20 = ρ02*` for Hermitian ρ, so the coherence terms only reach the
//! imaginary part. The same holds for the other three lines, which makes the
//! linear recovery of the diagonal exact. The opposite sign convention for the
//! pulse flips every line and breaks the recovery formulas.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::Vector4;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{OscError, Result};
use crate::linalg::{
    floor_rounding, hermitian_eigen, hermiticity_residual, kron, psd_sqrt, CMat2, CMat4, C64,
};

pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
pub const TRACE_TOLERANCE: f64 = 1e-12;
pub const PSD_TOLERANCE: f64 = 1e-10;

/// Validated two-qubit density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    rho: CMat4,
}

impl DensityMatrix {
    pub fn new(rho: CMat4) -> Result<Self> {
        if rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(OscError::NonFinite { name: "rho" });
        }
        let herm = hermiticity_residual(&rho);
        if herm > HERMITIAN_TOLERANCE {
            return Err(OscError::NotHermitian(herm));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > TRACE_TOLERANCE || tr.im.abs() > TRACE_TOLERANCE {
            return Err(OscError::BadTrace(tr.re));
        }
        let (values, _) = hermitian_eigen(&rho);
        if values[0] < -PSD_TOLERANCE {
            return Err(OscError::NotPositive(values[0]));
        }
        Ok(Self { rho })
    }

    /// `|ψ⟩⟨ψ|` after normalizing `ψ`.
    pub fn from_pure(psi: &Vector4<C64>) -> Result<Self> {
        let norm = psi.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(OscError::NonFinite { name: "psi" });
        }
        let v = psi / C64::new(norm, 0.0);
        Self::new(v * v.adjoint())
    }

    pub fn maximally_mixed() -> Self {
        Self {
            rho: CMat4::identity() * C64::new(0.25, 0.0),
        }
    }

    pub fn matrix(&self) -> &CMat4 {
        &self.rho
    }

    /// Diagonal `(ρ11, ρ22, ρ33, ρ44)`.
    pub fn populations(&self) -> [f64; 4] {
        [0, 1, 2, 3].map(|k| self.rho[(k, k)].re)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PpsParams {
    eta: f64,
}

impl PpsParams {
    pub const DEFAULT_ETA: f64 = 1e-5;

    pub fn new(eta: f64) -> Result<Self> {
        if !eta.is_finite() || eta <= 0.0 || eta > 1.0 {
            return Err(OscError::BadPolarization(eta));
        }
        Ok(Self { eta })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

impl Default for PpsParams {
    fn default() -> Self {
        Self {
            eta: Self::DEFAULT_ETA,
        }
    }
}

/// `(1−η)/4 · I + η |00⟩⟨00|`.
pub fn pps_state(params: PpsParams) -> DensityMatrix {
    let mut psi = Vector4::zeros();
    psi[0] = C64::new(1.0, 0.0);
    pseudo_pure(&psi, params).expect("|00> is normalized")
}

/// `(1−η)/4 · I + η |ψ⟩⟨ψ|`.
pub fn pseudo_pure(psi: &Vector4<C64>, params: PpsParams) -> Result<DensityMatrix> {
    let pure = DensityMatrix::from_pure(psi)?;
    let eta = params.eta;
    let rho = CMat4::identity() * C64::new((1.0 - eta) / 4.0, 0.0) + pure.rho * C64::new(eta, 0.0);
    DensityMatrix::new(rho)
}

/// Maps a pseudo-pure population back to the pure-state value.
pub fn pps_to_pure(population: f64, params: PpsParams) -> f64 {
    (population - (1.0 - params.eta) / 4.0) / params.eta
}

/// `(Tr √(√ρ σ √ρ))²`, clamped into `[0, 1]`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    let s = psd_sqrt(&rho.rho);
    let inner = s * sigma.rho * s;
    let (mut values, _) = hermitian_eigen(&inner);
    floor_rounding(&mut values);
    let tr: f64 = values.iter().map(|v| v.sqrt()).sum();
    (tr * tr).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AcquisitionPulse {
    /// `Ry(π/2)` on qubit 0.
    YI,
    /// `Ry(π/2)` on qubit 1.
    IY,
}

fn ry_half_pi() -> CMat2 {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    CMat2::new(h, -h, h, h)
}

pub fn acquisition_unitary(pulse: AcquisitionPulse) -> CMat4 {
    match pulse {
        AcquisitionPulse::YI => kron(&ry_half_pi(), &CMat2::identity()),
        AcquisitionPulse::IY => kron(&CMat2::identity(), &ry_half_pi()),
    }
}

pub fn acquisition_map(rho: &DensityMatrix, pulse: AcquisitionPulse) -> DensityMatrix {
    let r = acquisition_unitary(pulse);
    DensityMatrix {
        rho: r * rho.rho * r.adjoint(),
    }
}

/// Absorption-mode line intensities after the two acquisitions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralReadout {
    pub r1_13: f64,
    pub r1_24: f64,
    pub r2_12: f64,
    pub r2_34: f64,
    /// Standard deviation of the noise that was added, zero for exact readout.
    pub sigma: f64,
}

impl SpectralReadout {
    pub fn values(&self) -> [f64; 4] {
        [self.r1_13, self.r1_24, self.r2_12, self.r2_34]
    }
}

pub fn readout_from(rho: &DensityMatrix) -> SpectralReadout {
    let m1 = acquisition_map(rho, AcquisitionPulse::YI).rho;
    let m2 = acquisition_map(rho, AcquisitionPulse::IY).rho;
    SpectralReadout {
        r1_13: m1[(0, 2)].re,
        r1_24: m1[(1, 3)].re,
        r2_12: m2[(0, 1)].re,
        r2_34: m2[(2, 3)].re,
        sigma: 0.0,
    }
}

/// Exact readout plus independent `N(0, σ²)` noise on each line.
pub fn noisy_readout(rho: &DensityMatrix, sigma: f64, seed: u64) -> Result<SpectralReadout> {
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(OscError::BadSigma(sigma));
    }
    let mut r = readout_from(rho);
    if sigma == 0.0 {
        return Ok(r);
    }
    let normal = Normal::new(0.0, sigma).map_err(|_| OscError::BadSigma(sigma))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for v in [&mut r.r1_13, &mut r.r1_24, &mut r.r2_12, &mut r.r2_34] {
        *v += normal.sample(&mut rng);
    }
    r.sigma = sigma;
    Ok(r)
}

/// Recovered `(ρ11, ρ22, ρ33)`, i.e. `(P_e, P_μ, P_τ)` for a pure output state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractedProbabilities {
    pub raw: [f64; 3],
    pub clamped: [f64; 3],
}

pub fn extract_probabilities(readout: &SpectralReadout) -> ExtractedProbabilities {
    let s1 = readout.r1_13 + readout.r1_24;
    let raw = [
        (1.0 + 2.0 * s1 + 4.0 * readout.r2_12) / 4.0,
        (1.0 + 2.0 * s1 - 4.0 * readout.r2_12) / 4.0,
        (1.0 - 2.0 * s1 + 4.0 * readout.r2_34) / 4.0,
    ];
    ExtractedProbabilities {
        raw,
        clamped: raw.map(|p| p.clamp(0.0, 1.0)),
    }
}

/// Standard deviation of each recovered probability for line noise `σ`.
pub fn propagated_sigma(sigma: f64) -> f64 {
    // Coefficients (1/2, 1/2, 1) in every row.
    sigma * 1.5f64.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(k: usize) -> Vector4<C64> {
        let mut v = Vector4::zeros();
        v[k] = C64::new(1.0, 0.0);
        v
    }

    #[test]
    fn pure_pps_is_projector() {
        let rho = pps_state(PpsParams::new(1.0).unwrap());
        assert_eq!(rho.populations(), [1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn pps_population() {
        let p = PpsParams::default();
        let rho = pps_state(p);
        assert!((rho.populations()[0] - (1.0 + 3.0 * p.eta()) / 4.0).abs() < 1e-16);
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-15);
        assert!((pps_to_pure(rho.populations()[0], p) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn polarization_bounds() {
        assert!(PpsParams::new(0.0).is_err());
        assert!(PpsParams::new(1.5).is_err());
        assert!(PpsParams::new(1.0).is_ok());
    }

    #[test]
    fn invalid_density_matrices() {
        let mut m = CMat4::identity() * C64::new(0.25, 0.0);
        m[(0, 1)] = C64::new(0.0, 0.1);
        assert!(matches!(
            DensityMatrix::new(m),
            Err(OscError::NotHermitian(_))
        ));
        assert!(matches!(
            DensityMatrix::new(CMat4::identity()),
            Err(OscError::BadTrace(_))
        ));
        let neg =
            CMat4::from_diagonal(&Vector4::new(1.2, -0.2, 0.0, 0.0).map(|x| C64::new(x, 0.0)));
        assert!(matches!(
            DensityMatrix::new(neg),
            Err(OscError::NotPositive(_))
        ));
    }

    #[test]
    fn yi_on_ground_state() {
        let rho = DensityMatrix::from_pure(&basis(0)).unwrap();
        let m = acquisition_map(&rho, AcquisitionPulse::YI);
        assert!((m.matrix()[(0, 2)].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn maximally_mixed_is_fixed_point() {
        let rho = DensityMatrix::maximally_mixed();
        for p in [AcquisitionPulse::YI, AcquisitionPulse::IY] {
            let d = acquisition_map(&rho, p).matrix() - rho.matrix();
            assert!(d.iter().all(|z| z.norm() < 1e-15));
        }
        let e = extract_probabilities(&readout_from(&rho));
        for v in e.raw {
            assert!((v - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn basis_states_extract_exactly() {
        for k in 0..4 {
            let e =
                extract_probabilities(&readout_from(&DensityMatrix::from_pure(&basis(k)).unwrap()));
            for j in 0..3 {
                let want = if j == k { 1.0 } else { 0.0 };
                assert!((e.raw[j] - want).abs() < 1e-15, "{k} {j}");
            }
        }
    }

    #[test]
    fn fidelity_of_orthogonal_pure_states() {
        let a = DensityMatrix::from_pure(&basis(0)).unwrap();
        let b = DensityMatrix::from_pure(&basis(3)).unwrap();
        assert!(fidelity(&a, &b) < 1e-12);
        assert!((fidelity(&a, &a) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn noise_is_seeded() {
        let rho = DensityMatrix::maximally_mixed();
        let a = noisy_readout(&rho, 0.01, 7).unwrap();
        let b = noisy_readout(&rho, 0.01, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, noisy_readout(&rho, 0.01, 8).unwrap());
        assert_eq!(noisy_readout(&rho, 0.0, 7).unwrap(), readout_from(&rho));
        assert!(noisy_readout(&rho, -1.0, 7).is_err());
    }
}
