//! Collective-spin simulation of probe-generated and probe-read Bell correlations.
//!
//! `spin` holds the Dicke-basis machinery, `generation` the central-spin and twisting
//! dynamics, `readout` the probe measurement chain, `certify` the witnesses built on it and
//! `oracle` the brute-force product-space twins.

pub mod certify;
pub mod error;
pub mod format;
pub mod fourier;
pub mod generation;
pub mod linalg;
pub mod oracle;
pub mod readout;
pub mod spin;

pub use certify::{certify, certify_grid, CertificationReport, ThetaProfile};
pub use error::{Error, Result};
pub use fourier::Differentiation;
pub use generation::{
    sweep, BellCorrelator, CentralSpinParams, GenerationModel, GenerationSweepResult, JointState,
    SweepPoint,
};
pub use linalg::{ComplexMatrix, ComplexVector};
pub use oracle::{FullState, OracleReport};
pub use readout::{ProbeCoupling, ProbeRun, Provenance, ReadoutGrid, SymmetricDensityMatrix};
pub use spin::{CollectiveBasis, HalfInteger, MixingMatrix, StateVector};
