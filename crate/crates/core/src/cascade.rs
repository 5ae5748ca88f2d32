//! Four-level biexciton cascade: parameters, phonon-assisted exciton
//! scattering rates and the Liouvillian of the Lindblad master equation.
//!
//! Level labels:
//!
//! | index | state | meaning            |
//! |-------|-------|--------------------|
//! | 0     | G     | empty dot          |
//! | 1     | X_V   | V-polarized exciton|
//! | 2     | X_H   | H-polarized exciton|
//! | 3     | XX    | biexciton          |
//!
//! Energies are carried in μeV and rates in 1/ns; `ħ` converts between them
//! wherever an energy enters as a frequency.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{CascadeError, Result};
use crate::linalg::{sandwich_superop, ComplexMatrix, Superoperator};

pub const GROUND: usize = 0;
pub const EXCITON_V: usize = 1;
pub const EXCITON_H: usize = 2;
pub const BIEXCITON: usize = 3;

/// Physical constants in the μeV / ns / K unit system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, μeV·ns.
    pub hbar: f64,
    /// Boltzmann constant, μeV/K.
    pub k_b: f64,
}

pub const CONSTANTS: PhysicalConstants = PhysicalConstants {
    hbar: 0.658_211_956_9,
    k_b: 86.173_33,
};

/// Default phonon-coupling prefactor, 1/(ns·μeV³).
///
/// Illustrative value only: it puts each exciton spin-flip rate near
/// 0.1 ns⁻¹ at S = 2.5 μeV and T = 10 K.
pub const DEFAULT_KAPPA0: f64 = 2e-5;

/// Inputs of the cascade model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CascadeParams {
    /// XX → X_H radiative rate, 1/ns.
    pub gamma32: f64,
    /// XX → X_V radiative rate, 1/ns.
    pub gamma31: f64,
    /// X_H → G radiative rate, 1/ns.
    pub gamma20: f64,
    /// X_V → G radiative rate, 1/ns.
    pub gamma10: f64,
    /// Fine-structure splitting S, μeV. X_H sits S above X_V.
    pub fss: f64,
    /// Lattice temperature, K.
    pub temperature: f64,
    /// Phonon coupling prefactor κ₀ in κ = κ₀·S³, 1/(ns·μeV³).
    pub kappa0: f64,
    /// Spectral overlap fraction of the two exciton lines.
    pub eta: f64,
    /// Background noise weight.
    pub g_noise: f64,
    /// Biexciton energy ω₃, μeV. Does not affect any polarization observable.
    pub biexciton_energy: f64,
}

impl Default for CascadeParams {
    fn default() -> Self {
        CascadeParams {
            gamma32: 1.8,
            gamma31: 1.8,
            gamma20: 1.3,
            gamma10: 1.3,
            fss: 2.5,
            temperature: 10.0,
            kappa0: DEFAULT_KAPPA0,
            eta: 0.91,
            g_noise: 0.45,
            biexciton_energy: 0.0,
        }
    }
}

impl CascadeParams {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("gamma32", self.gamma32),
            ("gamma31", self.gamma31),
            ("gamma20", self.gamma20),
            ("gamma10", self.gamma10),
            ("fss", self.fss),
            ("temperature", self.temperature),
            ("kappa0", self.kappa0),
            ("g_noise", self.g_noise),
        ];
        for (name, value) in named {
            if !value.is_finite() || value < 0.0 {
                return Err(CascadeError::Parameter(format!(
                    "{name} must be finite and non-negative, got {value}"
                )));
            }
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(CascadeError::Parameter(format!(
                "eta must lie in [0, 1], got {}",
                self.eta
            )));
        }
        if !self.biexciton_energy.is_finite() {
            return Err(CascadeError::Parameter("biexciton_energy must be finite".into()));
        }
        Ok(())
    }

    /// Total biexciton decay rate γ₃₂ + γ₃₁.
    pub fn biexciton_decay(&self) -> f64 {
        self.gamma32 + self.gamma31
    }

    /// Exciton splitting as an angular frequency, rad/ns.
    pub fn fss_frequency(&self) -> f64 {
        self.fss / CONSTANTS.hbar
    }

    /// Γ = γ₂₀ + γ₁₀ + γ₁₂ + γ₂₁, the summed exciton depopulation rates.
    pub fn exciton_dephasing_sum(&self) -> Result<f64> {
        let ph = phonon_rates(self)?;
        Ok(self.gamma20 + self.gamma10 + ph.gamma12 + ph.gamma21)
    }
}

/// Phonon-assisted scattering rates between the two exciton levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhononRates {
    /// Absorption X_V → X_H, 1/ns.
    pub gamma12: f64,
    /// Emission X_H → X_V, 1/ns.
    pub gamma21: f64,
    /// Bose occupation at energy S. Infinite when S = 0 and T > 0.
    pub n_bose: f64,
    /// Set when S = 0 and both rates were forced to their vanishing limit.
    pub degenerate: bool,
}

/// Thermal occupation `1/(exp(S/k_B T) − 1)` of a phonon of energy S (μeV)
/// at temperature T (K).
///
/// Returns 0 at T = 0 and `f64::INFINITY` for S = 0 with T > 0.
pub fn bose_occupation(fss: f64, temperature: f64) -> Result<f64> {
    if !(fss >= 0.0 && fss.is_finite()) || !(temperature >= 0.0 && temperature.is_finite()) {
        return Err(CascadeError::Parameter(format!(
            "bose_occupation needs S >= 0 and T >= 0, got S = {fss}, T = {temperature}"
        )));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    if fss == 0.0 {
        return Ok(f64::INFINITY);
    }
    let x = fss / (CONSTANTS.k_b * temperature);
    if x < 1e-6 {
        Ok(1.0 / x - 0.5 + x / 12.0)
    } else {
        Ok(1.0 / x.exp_m1())
    }
}

/// γ₁₂ = κ N_B and γ₂₁ = κ (N_B + 1) with κ = κ₀ S³.
pub fn phonon_rates(p: &CascadeParams) -> Result<PhononRates> {
    p.validate()?;
    let n_bose = bose_occupation(p.fss, p.temperature)?;
    if p.fss == 0.0 {
        return Ok(PhononRates {
            gamma12: 0.0,
            gamma21: 0.0,
            n_bose,
            degenerate: true,
        });
    }
    let kappa = p.kappa0 * p.fss.powi(3);
    Ok(PhononRates {
        gamma12: kappa * n_bose,
        gamma21: kappa * (n_bose + 1.0),
        n_bose,
        degenerate: false,
    })
}

/// Jump operators and their rates, in the order
/// `|2⟩⟨3|, |1⟩⟨3|, |0⟩⟨2|, |0⟩⟨1|, |1⟩⟨2|, |2⟩⟨1|`.
pub fn jump_channels(p: &CascadeParams) -> Result<Vec<(ComplexMatrix, f64)>> {
    let ph = phonon_rates(p)?;
    Ok(vec![
        (ComplexMatrix::ket_bra(4, EXCITON_H, BIEXCITON), p.gamma32),
        (ComplexMatrix::ket_bra(4, EXCITON_V, BIEXCITON), p.gamma31),
        (ComplexMatrix::ket_bra(4, GROUND, EXCITON_H), p.gamma20),
        (ComplexMatrix::ket_bra(4, GROUND, EXCITON_V), p.gamma10),
        (ComplexMatrix::ket_bra(4, EXCITON_V, EXCITON_H), ph.gamma21),
        (ComplexMatrix::ket_bra(4, EXCITON_H, EXCITON_V), ph.gamma12),
    ])
}

/// Bare Hamiltonian diag(0, 0, S, ω₃) in μeV.
pub fn hamiltonian(p: &CascadeParams) -> ComplexMatrix {
    ComplexMatrix::from_real_diagonal(&[0.0, 0.0, p.fss, p.biexciton_energy])
}

/// Liouvillian `L` with `d vec(ρ)/dt = L vec(ρ)`, in 1/ns.
///
/// Coherent part `−i[H₀, ρ]/ħ`; each channel contributes
/// `γ (A ρ A† − ½ A†A ρ − ½ ρ A†A)`.
pub fn build_liouvillian(p: &CascadeParams) -> Result<Superoperator> {
    p.validate()?;
    let id = ComplexMatrix::identity(4);
    let h = hamiltonian(p).scale_real(1.0 / CONSTANTS.hbar);
    let minus_i = C64::new(0.0, -1.0);

    let mut l = &sandwich_superop(&h, &id) - &sandwich_superop(&id, &h);
    l = l.scale(minus_i);

    for (a, rate) in jump_channels(p)? {
        if rate == 0.0 {
            continue;
        }
        let ad = a.adjoint();
        let ada = &ad * &a;
        let jump = sandwich_superop(&a, &ad);
        let left = sandwich_superop(&ada, &id);
        let right = sandwich_superop(&id, &ada);
        l.add_scaled(&jump, C64::new(rate, 0.0));
        l.add_scaled(&left, C64::new(-0.5 * rate, 0.0));
        l.add_scaled(&right, C64::new(-0.5 * rate, 0.0));
    }
    Superoperator::from_matrix(l)
}

/// Complex eigenvalue `iS/ħ − Γ/2` of the exciton coherence `|1⟩⟨2|`.
pub fn exciton_coherence_decay(p: &CascadeParams) -> Result<C64> {
    let gamma = p.exciton_dephasing_sum()?;
    Ok(C64::new(-0.5 * gamma, p.fss_frequency()))
}
