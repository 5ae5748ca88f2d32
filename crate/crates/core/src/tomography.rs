//! Measured two-photon state: coherent gated part, spectrally
//! distinguishable part and flat background.

use num_complex::Complex64 as C64;

use crate::correlator::RawPolarizationMatrix;
use crate::error::{CascadeError, Result};
use crate::linalg::{eigenvalues_hermitian, ComplexMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Gate-integrated correlation matrix.
    Pol,
    /// Spectrally distinguishable pairs: diagonal of `Pol`.
    Noc,
    /// Uncorrelated background, `I/4`.
    Noise,
    /// Weighted mixture of the three.
    Total,
}

/// 4×4 two-photon density matrix over HH, HV, VH, VV.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarizationMatrix {
    entries: ComplexMatrix,
    provenance: Provenance,
}

impl PolarizationMatrix {
    pub fn new(entries: ComplexMatrix, provenance: Provenance) -> Result<Self> {
        if entries.dim() != 4 {
            return Err(CascadeError::Dimension(format!(
                "polarization matrix must be 4x4, got {0}x{0}",
                entries.dim()
            )));
        }
        if !entries.is_finite() {
            return Err(CascadeError::NumericalValidity("non-finite polarization matrix".into()));
        }
        Ok(PolarizationMatrix { entries, provenance })
    }

    pub fn from_raw(raw: &RawPolarizationMatrix) -> Self {
        PolarizationMatrix {
            entries: raw.entries.clone(),
            provenance: Provenance::Pol,
        }
    }

    pub fn noise() -> Self {
        PolarizationMatrix {
            entries: ComplexMatrix::identity(4).scale_real(0.25),
            provenance: Provenance::Noise,
        }
    }

    /// `|Φ⁺⟩⟨Φ⁺|` with `|Φ⁺⟩ = (|HH⟩ + |VV⟩)/√2`.
    pub fn bell_phi_plus() -> Self {
        let mut m = ComplexMatrix::zeros(4);
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            m[(i, j)] = C64::new(0.5, 0.0);
        }
        PolarizationMatrix { entries: m, provenance: Provenance::Pol }
    }

    pub fn entries(&self) -> &ComplexMatrix {
        &self.entries
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries[(i, j)]
    }

    /// Hermitian within 1e-10, unit trace within 1e-10, eigenvalues ≥ −1e-9,
    /// plus the structural constraints of `Noc` and `Noise`.
    pub fn validate(&self) -> Result<()> {
        let m = &self.entries;
        let herm = m.hermiticity_defect();
        if herm > 1e-10 {
            return Err(CascadeError::NumericalValidity(format!("not Hermitian: defect {herm:e}")));
        }
        let tr = m.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(CascadeError::NumericalValidity(format!("trace {tr} differs from 1")));
        }
        let min = eigenvalues_hermitian(m)?[3];
        if min < -1e-9 {
            return Err(CascadeError::NumericalValidity(format!("negative eigenvalue {min:e}")));
        }
        match self.provenance {
            Provenance::Noc => {
                let off = (0..4)
                    .flat_map(|i| (0..4).map(move |j| (i, j)))
                    .filter(|(i, j)| i != j)
                    .any(|(i, j)| m[(i, j)] != C64::new(0.0, 0.0));
                if off {
                    return Err(CascadeError::NumericalValidity("noc matrix has off-diagonal entries".into()));
                }
            }
            Provenance::Noise => {
                if *m != ComplexMatrix::identity(4).scale_real(0.25) {
                    return Err(CascadeError::NumericalValidity("noise matrix differs from I/4".into()));
                }
            }
            Provenance::Pol | Provenance::Total => {}
        }
        Ok(())
    }
}

/// Keeps the diagonal of `pol` and drops all coherences.
pub fn make_noc(pol: &PolarizationMatrix) -> PolarizationMatrix {
    let diag = pol.entries.diagonal();
    PolarizationMatrix {
        entries: ComplexMatrix::from_diagonal(&diag),
        provenance: Provenance::Noc,
    }
}

/// `(η ρ_pol + (1−η) ρ_noc + g I/4) / (1 + g)`.
pub fn mix_total(pol: &PolarizationMatrix, eta: f64, g: f64) -> Result<PolarizationMatrix> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(CascadeError::Parameter(format!("eta must lie in [0, 1], got {eta}")));
    }
    if !(g >= 0.0 && g.is_finite()) {
        return Err(CascadeError::Parameter(format!("noise weight must be >= 0, got {g}")));
    }
    let noc = make_noc(pol);
    let noise = PolarizationMatrix::noise();
    let norm = 1.0 / (1.0 + g);
    let mut total = ComplexMatrix::zeros(4);
    total.add_scaled(&pol.entries, C64::new(eta * norm, 0.0));
    total.add_scaled(&noc.entries, C64::new((1.0 - eta) * norm, 0.0));
    total.add_scaled(&noise.entries, C64::new(g * norm, 0.0));
    Ok(PolarizationMatrix {
        entries: total,
        provenance: Provenance::Total,
    })
}

/// Overlap `4γ²/(S² + 4γ²)` of two unit-area Lorentzians with half width
/// `γ = linewidth/2` whose centres are `S` apart (both in μeV).
///
/// Convenience only; the mixing weight η is always a separate input.
pub fn overlap_eta_lorentzian(fss: f64, linewidth: f64) -> Result<f64> {
    if !(linewidth > 0.0 && linewidth.is_finite()) {
        return Err(CascadeError::Parameter(format!("linewidth must be > 0, got {linewidth}")));
    }
    if fss.is_infinite() {
        return Ok(0.0);
    }
    let four_g2 = linewidth * linewidth;
    Ok(four_g2 / (fss * fss + four_g2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x_state(d: [f64; 4], rho14: C64) -> PolarizationMatrix {
        let mut m = ComplexMatrix::from_real_diagonal(&d);
        m[(0, 3)] = rho14;
        m[(3, 0)] = rho14.conj();
        PolarizationMatrix::new(m, Provenance::Pol).unwrap()
    }

    #[test]
    fn noc_examples() {
        let noc = make_noc(&PolarizationMatrix::bell_phi_plus());
        assert_eq!(*noc.entries(), ComplexMatrix::from_real_diagonal(&[0.5, 0.0, 0.0, 0.5]));
        noc.validate().unwrap();

        let white = PolarizationMatrix::new(ComplexMatrix::identity(4).scale_real(0.25), Provenance::Pol).unwrap();
        assert_eq!(make_noc(&white).entries(), white.entries());
    }

    #[test]
    fn noc_is_idempotent() {
        let rho = x_state([0.4, 0.1, 0.15, 0.35], C64::new(0.2, -0.1));
        let once = make_noc(&rho);
        let twice = make_noc(&once);
        assert_eq!(once, twice);
        assert!((once.entries().trace() - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn mix_identity_case() {
        let rho = x_state([0.4, 0.1, 0.15, 0.35], C64::new(0.2, -0.1));
        let tot = mix_total(&rho, 1.0, 0.0).unwrap();
        assert_eq!(tot.entries(), rho.entries());
        assert_eq!(tot.provenance(), Provenance::Total);
    }

    #[test]
    fn mix_noise_dominated_limit() {
        let rho = PolarizationMatrix::bell_phi_plus();
        let g = 1e6;
        let tot = mix_total(&rho, 0.0, g).unwrap();
        let diff = (tot.entries() - &ComplexMatrix::identity(4).scale_real(0.25)).max_abs();
        assert!(diff < 1.0 / g);
    }

    #[test]
    fn mix_with_reported_parameters() {
        let tot = mix_total(&PolarizationMatrix::bell_phi_plus(), 0.91, 0.45).unwrap();
        // (0.5 + 0.45/4) / 1.45 and (0.45/4) / 1.45 and 0.91 * 0.5 / 1.45
        let d_outer = (0.5 + 0.1125) / 1.45;
        let d_inner = 0.1125 / 1.45;
        let coh = 0.455 / 1.45;
        assert!((tot.get(0, 0).re - d_outer).abs() < 1e-15);
        assert!((tot.get(1, 1).re - d_inner).abs() < 1e-15);
        assert!((tot.get(0, 3).re - coh).abs() < 1e-15);
        assert!((d_outer - 0.42241).abs() < 1e-5);
        assert!((d_inner - 0.07759).abs() < 1e-5);
        assert!((coh - 0.31379).abs() < 1e-5);
        tot.validate().unwrap();
    }

    #[test]
    fn mix_rejects_bad_weights() {
        let rho = PolarizationMatrix::bell_phi_plus();
        assert!(mix_total(&rho, -0.1, 0.0).is_err());
        assert!(mix_total(&rho, 1.1, 0.0).is_err());
        assert!(mix_total(&rho, 0.5, -1.0).is_err());
    }

    #[test]
    fn mix_scaling_relations() {
        let rho = x_state([0.4, 0.1, 0.15, 0.35], C64::new(0.2, -0.1));
        for (eta, g) in [(0.3, 0.0), (0.91, 0.45), (0.0, 2.0), (1.0, 10.0)] {
            let tot = mix_total(&rho, eta, g).unwrap();
            assert!((tot.get(0, 3) - rho.get(0, 3) * (eta / (1.0 + g))).norm() < 1e-16);
            for i in 0..4 {
                let expected = (rho.get(i, i).re + g / 4.0) / (1.0 + g);
                assert!((tot.get(i, i).re - expected).abs() < 1e-15);
            }
            tot.validate().unwrap();
        }
    }

    #[test]
    fn lorentzian_overlap() {
        assert_eq!(overlap_eta_lorentzian(0.0, 1.0).unwrap(), 1.0);
        assert_eq!(overlap_eta_lorentzian(f64::INFINITY, 1.0).unwrap(), 0.0);
        assert!(overlap_eta_lorentzian(1e9, 1.0).unwrap() < 1e-17);
        let gamma = 0.35;
        assert!((overlap_eta_lorentzian(2.0 * gamma, 2.0 * gamma).unwrap() - 0.5).abs() < 1e-15);
        assert!(overlap_eta_lorentzian(1.0, 0.0).is_err());
    }

    #[test]
    fn structural_validation() {
        let mut m = ComplexMatrix::from_real_diagonal(&[0.5, 0.0, 0.0, 0.5]);
        m[(0, 3)] = C64::new(0.1, 0.0);
        m[(3, 0)] = C64::new(0.1, 0.0);
        let fake = PolarizationMatrix::new(m, Provenance::Noc).unwrap();
        assert!(fake.validate().is_err());
        PolarizationMatrix::noise().validate().unwrap();
        let unphysical = x_state([0.1, 0.4, 0.4, 0.1], C64::new(0.3, 0.0));
        assert!(unphysical.validate().is_err());
    }
}
