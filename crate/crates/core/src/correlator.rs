//! Two-time dipole correlators via the quantum regression theorem and their
//! integration over the detection gate.
//!
//! For `t' = t + τ ≥ t`,
//!
//! ```text
//! ⟨A(t) B(t') C(t') D(t)⟩ = Tr[ B C · e^{Lτ}( D ρ(t) A ) ]
//! ```
//!
//! with `A = σ†_μ1`, `B = σ†_ν2`, `C = σ_ζ2`, `D = σ_ξ1`. The polarization
//! matrix element `⟨μν|ρ|ξζ⟩` integrates this over the biexciton emission
//! time `t ∈ [0, t_max]` and the delay `τ ∈ [τ_g, τ_g + w_g]`.

use num_complex::Complex64 as C64;

use crate::cascade::{CascadeParams, BIEXCITON, EXCITON_H, EXCITON_V, GROUND};
use crate::error::{CascadeError, Result};
use crate::linalg::{ComplexMatrix, Superoperator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    H,
    V,
}

/// Two-photon basis state `|first, second⟩`, ordered HH, HV, VH, VV.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PhotonPair {
    pub first: Polarization,
    pub second: Polarization,
}

impl PhotonPair {
    pub const HH: PhotonPair = PhotonPair::new(Polarization::H, Polarization::H);
    pub const HV: PhotonPair = PhotonPair::new(Polarization::H, Polarization::V);
    pub const VH: PhotonPair = PhotonPair::new(Polarization::V, Polarization::H);
    pub const VV: PhotonPair = PhotonPair::new(Polarization::V, Polarization::V);
    pub const BASIS: [PhotonPair; 4] = [Self::HH, Self::HV, Self::VH, Self::VV];

    pub const fn new(first: Polarization, second: Polarization) -> Self {
        PhotonPair { first, second }
    }

    pub fn index(self) -> usize {
        let bit = |p| match p {
            Polarization::H => 0,
            Polarization::V => 1,
        };
        2 * bit(self.first) + bit(self.second)
    }

    pub fn label(self) -> &'static str {
        ["HH", "HV", "VH", "VV"][self.index()]
    }
}

/// Emission (lowering) operators of the cascade.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionOperators {
    pub sigma_h1: ComplexMatrix,
    pub sigma_v1: ComplexMatrix,
    pub sigma_h2: ComplexMatrix,
    pub sigma_v2: ComplexMatrix,
}

impl Default for TransitionOperators {
    fn default() -> Self {
        TransitionOperators {
            sigma_h1: ComplexMatrix::ket_bra(4, EXCITON_H, BIEXCITON),
            sigma_v1: ComplexMatrix::ket_bra(4, EXCITON_V, BIEXCITON),
            sigma_h2: ComplexMatrix::ket_bra(4, GROUND, EXCITON_H),
            sigma_v2: ComplexMatrix::ket_bra(4, GROUND, EXCITON_V),
        }
    }
}

impl TransitionOperators {
    /// Biexciton-photon operator.
    pub fn first(&self, pol: Polarization) -> &ComplexMatrix {
        match pol {
            Polarization::H => &self.sigma_h1,
            Polarization::V => &self.sigma_v1,
        }
    }

    /// Exciton-photon operator.
    pub fn second(&self, pol: Polarization) -> &ComplexMatrix {
        match pol {
            Polarization::H => &self.sigma_h2,
            Polarization::V => &self.sigma_v2,
        }
    }
}

/// Step size in units of the fastest relevant rate. Keeps the composite
/// Simpson error near 1e-9 relative.
const STEP_RATE_PRODUCT: f64 = 0.03;
/// Biexciton population left at `t_max`, relative to its initial value.
const OUTER_CUTOFF: f64 = 1e-7;

/// Detection window and integration resolution, all in ns.
///
/// The biexciton photon is accepted at any `t ∈ [0, t_max]`; the exciton
/// photon is accepted when its delay lies in `[tau_g, tau_g + w_g]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateWindow {
    pub tau_g: f64,
    pub w_g: f64,
    pub t_max: f64,
    pub dt_outer: f64,
    pub dt_inner: f64,
}

impl GateWindow {
    /// Gate with horizon and steps derived from the cascade rates.
    pub fn new(p: &CascadeParams, tau_g: f64, w_g: f64) -> Result<Self> {
        p.validate()?;
        if !(tau_g.is_finite() && tau_g >= 0.0) {
            return Err(CascadeError::Parameter(format!("gate delay must be >= 0, got {tau_g}")));
        }
        if !(w_g.is_finite() && w_g > 0.0) {
            return Err(CascadeError::Parameter(format!("gate width must be > 0, got {w_g}")));
        }
        let gamma3 = p.biexciton_decay();
        if gamma3 <= 0.0 {
            return Err(CascadeError::Parameter(
                "biexciton decay rate gamma32 + gamma31 must be positive".into(),
            ));
        }
        let t_max = -OUTER_CUTOFF.ln() / gamma3;
        let dt_outer = STEP_RATE_PRODUCT / gamma3;
        Ok(GateWindow {
            tau_g,
            w_g,
            t_max,
            dt_outer,
            dt_inner: Self::inner_step_bound(p)?.min(w_g),
        })
    }

    /// Largest delay step that resolves both the exciton decay and the
    /// fine-structure beat.
    fn inner_step_bound(p: &CascadeParams) -> Result<f64> {
        let gamma = p.exciton_dephasing_sum()?;
        let omega = p.fss_frequency();
        let scale = gamma.max((omega * omega + 0.25 * gamma * gamma).sqrt());
        Ok(if scale > 0.0 { STEP_RATE_PRODUCT / scale } else { f64::INFINITY })
    }

    /// Same window with both steps divided by `factor`.
    pub fn refined(&self, factor: f64) -> Self {
        GateWindow {
            dt_outer: self.dt_outer / factor,
            dt_inner: self.dt_inner / factor,
            ..*self
        }
    }

    /// Checks the resolution contract against `p`.
    pub fn validate(&self, p: &CascadeParams) -> Result<()> {
        let fields = [
            ("tau_g", self.tau_g, true),
            ("w_g", self.w_g, false),
            ("t_max", self.t_max, false),
            ("dt_outer", self.dt_outer, false),
            ("dt_inner", self.dt_inner, false),
        ];
        for (name, v, zero_ok) in fields {
            if !v.is_finite() || v < 0.0 || (!zero_ok && v == 0.0) {
                return Err(CascadeError::Parameter(format!("gate field {name} invalid: {v}")));
            }
        }
        let gamma3 = p.biexciton_decay();
        if gamma3 <= 0.0 || (-gamma3 * self.t_max).exp() >= 1e-6 {
            return Err(CascadeError::Parameter(format!(
                "t_max = {} ns does not cover the biexciton decay",
                self.t_max
            )));
        }
        let gamma = p.exciton_dephasing_sum()?;
        let mut bound = f64::INFINITY;
        if p.fss > 0.0 {
            bound = bound.min(0.05 * 2.0 * std::f64::consts::PI / p.fss_frequency());
        }
        if gamma > 0.0 {
            bound = bound.min(0.05 / gamma);
        }
        if self.dt_inner > bound * (1.0 + 1e-12) {
            return Err(CascadeError::Parameter(format!(
                "dt_inner = {} ns exceeds resolution bound {bound} ns",
                self.dt_inner
            )));
        }
        Ok(())
    }
}

/// Gate-integrated two-photon correlation matrix over the HH, HV, VH, VV basis.
#[derive(Debug, Clone, PartialEq)]
pub struct RawPolarizationMatrix {
    /// Integrated correlators before normalization.
    pub unnormalized: ComplexMatrix,
    /// Normalization factor `1 / Tr(unnormalized)`.
    pub normalization: f64,
    /// `normalization · unnormalized`, unit trace.
    pub entries: ComplexMatrix,
}

/// Initial state after short-pulse excitation, `|3⟩⟨3|`.
pub fn biexciton_initial_state() -> ComplexMatrix {
    ComplexMatrix::ket_bra(4, BIEXCITON, BIEXCITON)
}

/// Single correlator `⟨σ†_μ1(t) σ†_ν2(t+τ) σ_ζ2(t+τ) σ_ξ1(t)⟩` for row
/// `(μ, ν)` and column `(ξ, ζ)`.
pub fn two_time_element(
    l: &Superoperator,
    rho0: &ComplexMatrix,
    row: PhotonPair,
    col: PhotonPair,
    t: f64,
    tau: f64,
) -> Result<C64> {
    if tau < 0.0 {
        return Err(CascadeError::Ordering { tau });
    }
    if !(t >= 0.0 && t.is_finite() && tau.is_finite()) {
        return Err(CascadeError::Parameter(format!("invalid times t = {t}, tau = {tau}")));
    }
    let ops = TransitionOperators::default();
    let rho_t = l.exp(t)?.apply(rho0);
    let seed = first_photon_seed(&ops, &rho_t, row.first, col.first);
    let propagated = l.exp(tau)?.apply(&seed);
    Ok(second_photon_readout(&ops, &propagated, row.second, col.second))
}

/// `σ_ξ1 ρ σ†_μ1`.
fn first_photon_seed(ops: &TransitionOperators, rho: &ComplexMatrix, mu: Polarization, xi: Polarization) -> ComplexMatrix {
    &(ops.first(xi) * rho) * &ops.first(mu).adjoint()
}

/// `Tr[σ†_ν2 σ_ζ2 X]`.
fn second_photon_readout(ops: &TransitionOperators, x: &ComplexMatrix, nu: Polarization, zeta: Polarization) -> C64 {
    (&(&ops.second(nu).adjoint() * ops.second(zeta)) * x).trace()
}

/// Number of Simpson intervals (even, at least 2) covering `length` with
/// steps no larger than `max_step`.
pub(crate) fn simpson_intervals(length: f64, max_step: f64) -> usize {
    let n = (length / max_step).ceil().max(2.0) as usize;
    n + n % 2
}

pub(crate) fn simpson_weight(k: usize, n: usize) -> f64 {
    if k == 0 || k == n {
        1.0
    } else if k % 2 == 1 {
        4.0
    } else {
        2.0
    }
}

/// `∫₀^T e^{Ls} x ds` by composite Simpson with exact step propagators.
fn integrate_orbit(step: &Superoperator, start: &ComplexMatrix, n: usize, h: f64) -> ComplexMatrix {
    let mut acc = ComplexMatrix::zeros(start.dim());
    let mut state = start.clone();
    for k in 0..=n {
        acc.add_scaled(&state, C64::new(simpson_weight(k, n) * h / 3.0, 0.0));
        if k < n {
            state = step.apply(&state);
        }
    }
    acc
}

/// Integrates every polarization correlator over the gate and normalizes by
/// the trace.
///
/// Time translation invariance lets the outer integral act on the state
/// first: `∫dt e^{Lτ}(D ρ(t) A) = e^{Lτ}(D [∫ρ(t)dt] A)`.
pub fn assemble_raw_matrix(
    l: &Superoperator,
    rho0: &ComplexMatrix,
    gate: &GateWindow,
) -> Result<RawPolarizationMatrix> {
    for (name, v) in [("tau_g", gate.tau_g), ("t_max", gate.t_max)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(CascadeError::Parameter(format!("gate field {name} invalid: {v}")));
        }
    }
    for (name, v) in [("w_g", gate.w_g), ("dt_outer", gate.dt_outer), ("dt_inner", gate.dt_inner)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(CascadeError::Parameter(format!("gate field {name} must be > 0: {v}")));
        }
    }
    let ops = TransitionOperators::default();

    let n_outer = simpson_intervals(gate.t_max, gate.dt_outer);
    let h_outer = gate.t_max / n_outer as f64;
    let integrated_state = integrate_orbit(&l.exp(h_outer)?, rho0, n_outer, h_outer);

    let n_inner = simpson_intervals(gate.w_g, gate.dt_inner);
    let h_inner = gate.w_g / n_inner as f64;
    let delay = l.exp(gate.tau_g)?;
    let inner_step = l.exp(h_inner)?;

    let mut raw = ComplexMatrix::zeros(4);
    for mu in [Polarization::H, Polarization::V] {
        for xi in [Polarization::H, Polarization::V] {
            let seed = first_photon_seed(&ops, &integrated_state, mu, xi);
            if seed.max_abs() == 0.0 {
                continue;
            }
            let start = delay.apply(&seed);
            let window = integrate_orbit(&inner_step, &start, n_inner, h_inner);
            for nu in [Polarization::H, Polarization::V] {
                for zeta in [Polarization::H, Polarization::V] {
                    let r = PhotonPair::new(mu, nu).index();
                    let c = PhotonPair::new(xi, zeta).index();
                    if r <= c {
                        raw[(r, c)] = second_photon_readout(&ops, &window, nu, zeta);
                    }
                }
            }
        }
    }
    for r in 0..4 {
        raw[(r, r)] = C64::new(raw[(r, r)].re, 0.0);
        for c in 0..r {
            raw[(r, c)] = raw[(c, r)].conj();
        }
    }

    let trace = raw.trace().re;
    if !(trace.is_finite() && trace > 0.0) {
        return Err(CascadeError::DegenerateGate(format!(
            "integrated coincidence weight is {trace:e} for tau_g = {}, w_g = {}",
            gate.tau_g, gate.w_g
        )));
    }
    let normalization = 1.0 / trace;
    let entries = raw.scale_real(normalization);
    if !entries.is_finite() {
        return Err(CascadeError::DegenerateGate(format!(
            "normalization overflow, trace = {trace:e}"
        )));
    }
    Ok(RawPolarizationMatrix {
        unnormalized: raw,
        normalization,
        entries,
    })
}

/// Liouvillian, biexciton initial state and gate-integrated matrix for `p`.
pub fn polarization_matrix(p: &CascadeParams, gate: &GateWindow) -> Result<RawPolarizationMatrix> {
    let l = crate::cascade::build_liouvillian(p)?;
    assemble_raw_matrix(&l, &biexciton_initial_state(), gate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascade::{build_liouvillian, exciton_coherence_decay};

    fn no_phonons() -> CascadeParams {
        CascadeParams { kappa0: 0.0, ..CascadeParams::default() }
    }

    #[test]
    fn operators_have_single_unit_entry() {
        let ops = TransitionOperators::default();
        for op in [&ops.sigma_h1, &ops.sigma_v1, &ops.sigma_h2, &ops.sigma_v2] {
            let nonzero: Vec<_> = op.as_slice().iter().filter(|z| z.norm() != 0.0).collect();
            assert_eq!(nonzero, vec![&C64::new(1.0, 0.0)]);
        }
        assert_eq!(&ops.sigma_h2 * &ops.sigma_h1, ComplexMatrix::ket_bra(4, 0, 3));
    }

    #[test]
    fn basis_order() {
        let idx: Vec<usize> = PhotonPair::BASIS.iter().map(|p| p.index()).collect();
        assert_eq!(idx, vec![0, 1, 2, 3]);
        assert_eq!(PhotonPair::VH.label(), "VH");
    }

    #[test]
    fn negative_delay_is_an_ordering_error() {
        let l = build_liouvillian(&CascadeParams::default()).unwrap();
        let err = two_time_element(&l, &biexciton_initial_state(), PhotonPair::HH, PhotonPair::HH, 0.1, -0.2);
        assert!(matches!(err, Err(CascadeError::Ordering { .. })));
    }

    #[test]
    fn hh_element_without_phonons() {
        let p = no_phonons();
        let l = build_liouvillian(&p).unwrap();
        let rho0 = biexciton_initial_state();
        for (t, tau) in [(0.0, 0.0), (0.3, 0.7), (1.1, 2.0)] {
            let got = two_time_element(&l, &rho0, PhotonPair::HH, PhotonPair::HH, t, tau).unwrap();
            let expected = (-3.6 * t).exp() * (-1.3 * tau).exp();
            assert!((got - C64::new(expected, 0.0)).norm() < 1e-12, "{got} vs {expected}");
        }
    }

    #[test]
    fn mismatched_sectors_vanish_without_phonons() {
        let l = build_liouvillian(&no_phonons()).unwrap();
        let rho0 = biexciton_initial_state();
        for row in PhotonPair::BASIS {
            for col in PhotonPair::BASIS {
                let z = two_time_element(&l, &rho0, row, col, 0.4, 0.9).unwrap();
                let allowed = (row == col && row.first == row.second)
                    || (row == PhotonPair::HH && col == PhotonPair::VV)
                    || (row == PhotonPair::VV && col == PhotonPair::HH);
                if !allowed {
                    assert!(z.norm() < 1e-15, "{:?},{:?}: {z}", row, col);
                }
            }
        }
    }

    #[test]
    fn coherence_element_matches_closed_form() {
        let p = CascadeParams::default();
        let l = build_liouvillian(&p).unwrap();
        let lambda = exciton_coherence_decay(&p).unwrap();
        let rho0 = biexciton_initial_state();
        for (t, tau) in [(0.0, 0.5), (0.2, 1.3), (0.9, 3.0)] {
            let got = two_time_element(&l, &rho0, PhotonPair::HH, PhotonPair::VV, t, tau).unwrap();
            let expected = (lambda * tau).exp() * (-3.6 * t).exp();
            assert!((got - expected).norm() < 1e-8, "{got} vs {expected}");
        }
    }

    #[test]
    fn symmetric_paths_without_phonons() {
        let p = no_phonons();
        let gate = GateWindow::new(&p, 0.0, 0.5).unwrap();
        let m = polarization_matrix(&p, &gate).unwrap().entries;
        assert!((m[(0, 0)].re - 0.5).abs() < 1e-12);
        assert!((m[(3, 3)].re - 0.5).abs() < 1e-12);
        assert!(m[(1, 1)].norm() < 1e-15 && m[(2, 2)].norm() < 1e-15);
    }

    #[test]
    fn zero_splitting_gives_bell_state() {
        let p = CascadeParams { fss: 0.0, ..CascadeParams::default() };
        for w in [0.05, 0.5, 3.0] {
            let gate = GateWindow::new(&p, 0.0, w).unwrap();
            let m = polarization_matrix(&p, &gate).unwrap().entries;
            assert!((m[(0, 3)] - C64::new(0.5, 0.0)).norm() < 1e-10, "{}", m[(0, 3)]);
        }
    }

    #[test]
    fn degenerate_gate_is_rejected() {
        let p = no_phonons();
        let gate = GateWindow::new(&p, 700.0, 1e-3).unwrap();
        assert!(matches!(polarization_matrix(&p, &gate), Err(CascadeError::DegenerateGate(_))));
        assert!(GateWindow::new(&p, 0.0, 0.0).is_err());
        assert!(GateWindow::new(&p, -1.0, 0.1).is_err());
    }

    #[test]
    fn default_gate_satisfies_contract() {
        let p = CascadeParams::default();
        let gate = GateWindow::new(&p, 0.0, 0.1).unwrap();
        gate.validate(&p).unwrap();
        let coarse = GateWindow { dt_inner: 1.0, w_g: 5.0, ..gate };
        assert!(coarse.validate(&p).is_err());
    }

    #[test]
    fn phonons_populate_cross_polarized_pairs() {
        let p = CascadeParams::default();
        let gate = GateWindow::new(&p, 0.0, 0.1).unwrap();
        let m = polarization_matrix(&p, &gate).unwrap().entries;
        assert!(m[(1, 1)].re > 0.0);
        assert!((m[(1, 1)].re - m[(2, 2)].re).abs() < 1e-4);
    }
}
