//! Polarization entanglement of photon pairs from a quantum-dot biexciton
//! cascade with phonon-assisted exciton spin scattering.
//!
//! The pipeline for one parameter point is
//! [`cascade::build_liouvillian`] → [`correlator::assemble_raw_matrix`] →
//! [`tomography::mix_total`] → [`metrics::EntanglementReport`], bundled in
//! [`pipeline::evaluate_point`].

pub mod cascade;
pub mod correlator;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod pipeline;
pub mod tomography;

pub use cascade::{CascadeParams, PhononRates, CONSTANTS};
pub use correlator::{GateWindow, PhotonPair, Polarization};
pub use error::{CascadeError, Result};
pub use linalg::{ComplexMatrix, Superoperator};
pub use metrics::{EntanglementReport, EsdResult, EsdStatus};
pub use pipeline::{evaluate_point, PointOutcome};
pub use tomography::{PolarizationMatrix, Provenance};
