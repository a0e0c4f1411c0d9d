//! Physical parameters, baselines and flavor labels.

use std::fmt;
use std::str::FromStr;

use crate::error::{OscError, Result};

/// Phase conversion: `dm2 [eV^2] * L [km] / E [GeV]` times this factor gives the
/// oscillation phase `dm2 L / 2E` in radians.
///
/// Deliberately `2 * 1.27` rather than the ħc-derived `2 * 1.26693`, so the
/// curves line up with the published ones.
pub const PHASE_FACTOR: f64 = 2.0 * 1.27;

/// Oscillation phase for a mass-squared difference over a baseline.
#[inline]
pub fn oscillation_phase(dm2: f64, baseline: &Baseline) -> f64 {
    PHASE_FACTOR * dm2 * baseline.l_over_e()
}

/// The six oscillation parameters. Angles in radians, splittings in eV^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscParams {
    pub theta12: f64,
    pub theta13: f64,
    pub theta23: f64,
    pub delta: f64,
    pub dm2_21: f64,
    pub dm2_31: f64,
    /// Antineutrino propagation conjugates the mixing matrix.
    pub antineutrino: bool,
}

impl OscParams {
    /// Global-fit values used throughout: θ12 = 33.45°, θ13 = 8.62°, θ23 = 42.1°,
    /// Δm²21 = 7.42e-5 eV², Δm²31 = 2.510e-3 eV², δ = 0.
    pub fn reference() -> Self {
        Self {
            theta12: 33.45_f64.to_radians(),
            theta13: 8.62_f64.to_radians(),
            theta23: 42.1_f64.to_radians(),
            delta: 0.0,
            dm2_21: 7.42e-5,
            dm2_31: 2.510e-3,
            antineutrino: false,
        }
    }

    pub fn from_degrees(
        theta12: f64,
        theta13: f64,
        theta23: f64,
        delta: f64,
        dm2_21: f64,
        dm2_31: f64,
    ) -> Result<Self> {
        let p = Self {
            theta12: theta12.to_radians(),
            theta13: theta13.to_radians(),
            theta23: theta23.to_radians(),
            delta: delta.to_radians(),
            dm2_21,
            dm2_31,
            antineutrino: false,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_antineutrino(mut self, anti: bool) -> Self {
        self.antineutrino = anti;
        self
    }

    /// `Δm²32 = Δm²31 − Δm²21`.
    pub fn dm2_32(&self) -> f64 {
        self.dm2_31 - self.dm2_21
    }

    /// The CP phase actually entering the mixing matrix.
    pub fn effective_delta(&self) -> f64 {
        if self.antineutrino {
            -self.delta
        } else {
            self.delta
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("theta12", self.theta12),
            ("theta13", self.theta13),
            ("theta23", self.theta23),
            ("delta", self.delta),
            ("dm2_21", self.dm2_21),
            ("dm2_31", self.dm2_31),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(OscError::NonFinite { name });
            }
        }
        Ok(())
    }
}

impl Default for OscParams {
    fn default() -> Self {
        Self::reference()
    }
}

/// Source-detector distance and neutrino energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Baseline {
    length_km: f64,
    energy_gev: f64,
}

impl Baseline {
    pub fn new(length_km: f64, energy_gev: f64) -> Result<Self> {
        if !length_km.is_finite() {
            return Err(OscError::NonFinite { name: "L" });
        }
        if !energy_gev.is_finite() {
            return Err(OscError::NonFinite { name: "E" });
        }
        if energy_gev <= 0.0 {
            return Err(OscError::NonPositiveEnergy(energy_gev));
        }
        if length_km < 0.0 {
            return Err(OscError::NegativeBaseline(length_km));
        }
        Ok(Self {
            length_km,
            energy_gev,
        })
    }

    /// Baseline at unit energy, so that `L/E` equals the given value.
    pub fn from_l_over_e(l_over_e: f64) -> Result<Self> {
        Self::new(l_over_e, 1.0)
    }

    pub fn length_km(&self) -> f64 {
        self.length_km
    }

    pub fn energy_gev(&self) -> f64 {
        self.energy_gev
    }

    /// km/GeV.
    pub fn l_over_e(&self) -> f64 {
        self.length_km / self.energy_gev
    }
}

/// Flavor basis label. `Sterile` only exists in the two-qubit embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flavor {
    Electron,
    Muon,
    Tau,
    Sterile,
}

impl Flavor {
    pub const ACTIVE: [Flavor; 3] = [Flavor::Electron, Flavor::Muon, Flavor::Tau];
    pub const ALL: [Flavor; 4] = [Flavor::Electron, Flavor::Muon, Flavor::Tau, Flavor::Sterile];

    /// Basis index: e → 0, μ → 1, τ → 2, χ → 3 (|00>, |01>, |10>, |11>).
    pub fn index(self) -> usize {
        match self {
            Flavor::Electron => 0,
            Flavor::Muon => 1,
            Flavor::Tau => 2,
            Flavor::Sterile => 3,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    /// Index into a three-flavor object; rejects the sterile state.
    pub fn active_index(self) -> Result<usize> {
        match self {
            Flavor::Sterile => Err(OscError::SterileFlavor("chi")),
            f => Ok(f.index()),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Flavor::Electron => "e",
            Flavor::Muon => "mu",
            Flavor::Tau => "tau",
            Flavor::Sterile => "chi",
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Flavor {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "e" | "nue" | "electron" => Ok(Flavor::Electron),
            "mu" | "numu" | "muon" => Ok(Flavor::Muon),
            "tau" | "nutau" => Ok(Flavor::Tau),
            "chi" | "sterile" => Ok(Flavor::Sterile),
            other => Err(format!("unknown flavor `{other}`")),
        }
    }
}
