//! Full evaluation of one parameter point: Liouvillian, gated correlation
//! matrix, spectral and noise mixing, entanglement metrics.

use crate::cascade::{build_liouvillian, CascadeParams};
use crate::correlator::{assemble_raw_matrix, biexciton_initial_state, GateWindow, RawPolarizationMatrix};
use crate::error::Result;
use crate::metrics::EntanglementReport;
use crate::tomography::{mix_total, PolarizationMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct PointOutcome {
    pub raw: RawPolarizationMatrix,
    pub pol: PolarizationMatrix,
    pub total: PolarizationMatrix,
    pub report: EntanglementReport,
}

pub fn evaluate_point(p: &CascadeParams, gate: &GateWindow) -> Result<PointOutcome> {
    p.validate()?;
    let l = build_liouvillian(p)?;
    let raw = assemble_raw_matrix(&l, &biexciton_initial_state(), gate)?;
    let pol = PolarizationMatrix::from_raw(&raw);
    let total = mix_total(&pol, p.eta, p.g_noise)?;
    let report = EntanglementReport::from_matrix(total.entries())?;
    Ok(PointOutcome { raw, pol, total, report })
}
