//! Three-flavor neutrino oscillations in vacuum and constant-density matter,
//! a two-qubit circuit realization of the same evolution, and an emulation of
//! the NMR readout chain used to measure it.

pub mod circuit;
pub mod error;
pub mod linalg;
pub mod matter;
pub mod nmr;
pub mod params;
pub mod pmns;
pub mod vacuum;

pub use error::{OscError, Result};
pub use params::{oscillation_phase, Baseline, Flavor, OscParams, PHASE_FACTOR};
pub use pmns::{build_pmns, pmns_from_angles, PmnsMatrix};
