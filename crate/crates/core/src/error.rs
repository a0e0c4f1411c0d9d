use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OscError {
    #[error("energy must be positive, got {0} GeV")]
    NonPositiveEnergy(f64),

    #[error("baseline must be non-negative, got {0} km")]
    NegativeBaseline(f64),

    #[error("matter potential must be non-negative, got {0} eV")]
    NegativePotential(f64),

    #[error("parameter `{name}` is not finite")]
    NonFinite { name: &'static str },

    #[error("flavor {0} is only valid in the two-qubit embedding")]
    SterileFlavor(&'static str),

    #[error("probability {value} is outside [0, 1] beyond rounding tolerance")]
    ProbabilityOutOfRange { value: f64 },

    #[error("probability has imaginary residual {0:e}")]
    ComplexProbability(f64),

    #[error("matrix is not Hermitian (residual {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (residual {0:e})")]
    NotUnitary(f64),

    #[error("density matrix trace is {0}, expected 1")]
    BadTrace(f64),

    #[error("density matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("polarization must lie in (0, 1], got {0}")]
    BadPolarization(f64),

    #[error("noise sigma must be non-negative and finite, got {0}")]
    BadSigma(f64),

    #[error("solar splitting and effective electron splitting must be non-zero for the matter approximation")]
    DegenerateSplitting,

    #[error("KAK decomposition failed: {0}")]
    Decomposition(&'static str),

    #[error("cannot parse circuit line {line}: {reason}")]
    CircuitParse { line: usize, reason: String },

    #[error("invalid gate: {0}")]
    InvalidGate(&'static str),
}

pub type Result<T> = std::result::Result<T, OscError>;
