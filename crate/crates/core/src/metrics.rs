//! Entanglement and fidelity of the two-photon state, the closed-form
//! gate-integrated coherence, and the sudden-death temperature search.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::cascade::{exciton_coherence_decay, phonon_rates, CascadeParams};
use crate::correlator::GateWindow;
use crate::error::{CascadeError, Result};
use crate::linalg::{eigenvalues_general, ComplexMatrix};
use crate::pipeline::evaluate_point;

/// Eigenvalues of the spin-flip product more negative than this signal an
/// invalid input rather than roundoff.
pub const EIGEN_CLIP: f64 = 1e-10;
/// Largest tolerated imaginary part of a spin-flip product eigenvalue.
pub const EIGEN_IMAG_TOL: f64 = 1e-8;
/// Concurrence at or below this value counts as separable.
pub const SEPARABLE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntanglementReport {
    pub concurrence: f64,
    pub fidelity: f64,
    pub purity: f64,
    /// `√λᵢ` of the spin-flip product, descending.
    pub sqrt_lambdas: [f64; 4],
}

impl EntanglementReport {
    pub fn from_matrix(rho: &ComplexMatrix) -> Result<Self> {
        let sqrt_lambdas = spin_flip_roots(rho)?;
        Ok(EntanglementReport {
            concurrence: concurrence_from_roots(&sqrt_lambdas),
            fidelity: fidelity_bell(rho),
            purity: purity(rho),
            sqrt_lambdas,
        })
    }
}

fn check_two_qubit(rho: &ComplexMatrix) -> Result<()> {
    if rho.dim() != 4 {
        return Err(CascadeError::Dimension(format!(
            "two-photon state must be 4x4, got {0}x{0}",
            rho.dim()
        )));
    }
    Ok(())
}

/// `σ_y ⊗ σ_y` in the HH, HV, VH, VV basis.
fn spin_flip() -> ComplexMatrix {
    let mut yy = ComplexMatrix::zeros(4);
    yy[(0, 3)] = C64::new(-1.0, 0.0);
    yy[(1, 2)] = C64::new(1.0, 0.0);
    yy[(2, 1)] = C64::new(1.0, 0.0);
    yy[(3, 0)] = C64::new(-1.0, 0.0);
    yy
}

/// Square roots of the eigenvalues of `ρ (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`, descending.
pub fn spin_flip_roots(rho: &ComplexMatrix) -> Result<[f64; 4]> {
    check_two_qubit(rho)?;
    let yy = spin_flip();
    let product = &(&(rho * &yy) * &rho.conj()) * &yy;
    let spectrum = eigenvalues_general(&product)?;
    let mut roots = [0.0; 4];
    for (slot, lambda) in roots.iter_mut().zip(&spectrum.eigenvalues) {
        if lambda.re < -EIGEN_CLIP || lambda.im.abs() > EIGEN_IMAG_TOL {
            return Err(CascadeError::NumericalValidity(format!(
                "spin-flip product eigenvalue {lambda} is not a valid non-negative real"
            )));
        }
        *slot = lambda.re.max(0.0).sqrt();
    }
    roots.sort_by(|a, b| b.total_cmp(a));
    Ok(roots)
}

fn concurrence_from_roots(r: &[f64; 4]) -> f64 {
    (r[0] - r[1] - r[2] - r[3]).max(0.0)
}

/// Wootters concurrence.
pub fn concurrence(rho: &ComplexMatrix) -> Result<f64> {
    Ok(concurrence_from_roots(&spin_flip_roots(rho)?))
}

/// Concurrence of an X-form state, `2 max(0, |ρ₁₄| − √(ρ₂₂ρ₃₃))`.
///
/// Only the HH–VV coherence may be nonzero off the diagonal (within 1e-8).
pub fn concurrence_x_oracle(rho: &ComplexMatrix) -> Result<f64> {
    check_two_qubit(rho)?;
    for i in 0..4 {
        for j in 0..4 {
            let corner = (i == 0 && j == 3) || (i == 3 && j == 0);
            if i != j && !corner && rho[(i, j)].norm() > 1e-8 {
                return Err(CascadeError::Form(format!(
                    "entry ({i},{j}) = {} breaks the X pattern",
                    rho[(i, j)]
                )));
            }
        }
    }
    let cross = (rho[(1, 1)].re * rho[(2, 2)].re).max(0.0).sqrt();
    Ok(2.0 * (rho[(0, 3)].norm() - cross).max(0.0))
}

/// `⟨Φ⁺|ρ|Φ⁺⟩ = ½(ρ₁₁ + ρ₄₄) + Re ρ₁₄`.
pub fn fidelity_bell(rho: &ComplexMatrix) -> f64 {
    0.5 * (rho[(0, 0)].re + rho[(3, 3)].re) + rho[(0, 3)].re
}

/// `Tr ρ²` for Hermitian ρ.
pub fn purity(rho: &ComplexMatrix) -> f64 {
    rho.as_slice().iter().map(|z| z.norm_sqr()).sum()
}

/// Closed-form gate-integrated HH–VV coherence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rho14Analytic {
    /// Biexciton-weighted integral, comparable to the unnormalized matrix.
    pub raw: C64,
    /// Divided by the closed-form trace of the gated diagonal.
    pub normalized: C64,
    /// Closed-form trace used for `normalized`.
    pub trace: f64,
}

/// `∫ₐ^{a+w} e^{λτ} dτ = e^{λa}(e^{λw} − 1)/λ`, with the λ → 0 limit `w`.
pub fn exp_window(lambda: C64, start: f64, width: f64) -> C64 {
    let z = lambda * width;
    let factor = if z.norm() < 1e-5 {
        C64::new(width, 0.0) * (C64::new(1.0, 0.0) + z / 2.0 + z * z / 6.0 + z * z * z / 24.0)
    } else {
        (z.exp() - 1.0) / lambda
    };
    (lambda * start).exp() * factor
}

fn real_window(k: f64, start: f64, width: f64) -> f64 {
    if (k * width).abs() < 1e-12 {
        (k * start).exp() * width * (1.0 + 0.5 * k * width)
    } else {
        (k * start).exp() * (k * width).exp_m1() / k
    }
}

/// `∫ₐᵇ τ e^{mτ} dτ`.
fn linear_exp_window(m: f64, a: f64, b: f64) -> f64 {
    if m.abs() * (b - a).max(b.abs()) < 1e-9 {
        0.5 * (b * b - a * a)
    } else {
        let prim = |t: f64| (m * t).exp() * (t / m - 1.0 / (m * m));
        prim(b) - prim(a)
    }
}

/// `∫ e^{Mτ} dτ` over the gate for the exciton population rate matrix,
/// acting on `(p_H, p_V)`.
fn exciton_population_window(p: &CascadeParams, start: f64, width: f64) -> Result<[[f64; 2]; 2]> {
    let ph = phonon_rates(p)?;
    let a = -(p.gamma20 + ph.gamma21);
    let b = ph.gamma12;
    let c = ph.gamma21;
    let d = -(p.gamma10 + ph.gamma12);
    let m = 0.5 * (a + d);
    let split = (0.25 * (a - d) * (a - d) + b * c).sqrt();
    let i_plus = real_window(m + split, start, width);
    let i_minus = real_window(m - split, start, width);
    let even = 0.5 * (i_plus + i_minus);
    let odd = if split * (start + width) < 1e-4 {
        linear_exp_window(m, start, start + width)
    } else {
        (i_plus - i_minus) / (2.0 * split)
    };
    let n = [[a - m, b], [c, d - m]];
    Ok([
        [even + odd * n[0][0], odd * n[0][1]],
        [odd * n[1][0], even + odd * n[1][1]],
    ])
}

/// Closed-form `ρ₁₄` for a gate starting at `tau_g` with width `w_g`.
///
/// The raw value carries the same biexciton weight `∫₀^{t_max} ρ₃₃ dt` as
/// the numerical assembly; the normalized value divides by the closed-form
/// gated trace.
pub fn rho14_analytic(p: &CascadeParams, gate: &GateWindow) -> Result<Rho14Analytic> {
    if gate.w_g.is_nan() || gate.w_g <= 0.0 {
        return Err(CascadeError::Parameter(format!("gate width must be > 0, got {}", gate.w_g)));
    }
    let lambda = exciton_coherence_decay(p)?;
    let gamma3 = p.biexciton_decay();
    let weight = if gamma3 * gate.t_max < 1e-12 {
        gate.t_max
    } else {
        -(-gamma3 * gate.t_max).exp_m1() / gamma3
    };
    let coherence = exp_window(lambda, gate.tau_g, gate.w_g) * weight;
    let pops = exciton_population_window(p, gate.tau_g, gate.w_g)?;
    let trace = weight * (pops[0][0] + pops[0][1] + pops[1][0] + pops[1][1]);
    Ok(Rho14Analytic {
        raw: coherence,
        normalized: coherence / trace,
        trace,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EsdStatus {
    /// Concurrence drops to zero inside the scanned range.
    Crossing,
    /// Concurrence stays positive over the whole range.
    EntangledThroughout,
    /// Concurrence is zero at the low end and never dies from a positive value.
    SeparableThroughout,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EsdResult {
    pub fss: f64,
    pub g_noise: f64,
    /// Midpoint of the final bracket, when a crossing was found.
    pub sudden_death_temperature: Option<f64>,
    /// Final bracket `(T_lo, T_hi)`; the scanned range when no crossing exists.
    pub bracket: (f64, f64),
    pub tolerance: f64,
    pub status: EsdStatus,
    /// More than one death crossing, or C(T) increasing somewhere on the scan.
    pub multi_crossing: bool,
    /// Coarse scan samples `(T, C)`.
    pub scan: Vec<(f64, f64)>,
}

/// Coarse scan step of the sudden-death search, K.
pub const DEFAULT_SCAN_STEP: f64 = 2.0;

/// Concurrence of the mixed state at temperature `t`. The gate keeps its
/// delay and width; its resolution is re-derived for the new rates.
pub fn concurrence_at_temperature(p: &CascadeParams, gate: &GateWindow, t: f64) -> Result<f64> {
    let at_t = CascadeParams { temperature: t, ..*p };
    let resolved = GateWindow::new(&at_t, gate.tau_g, gate.w_g)?;
    let gate = GateWindow {
        dt_outer: resolved.dt_outer.min(gate.dt_outer),
        dt_inner: resolved.dt_inner.min(gate.dt_inner),
        t_max: resolved.t_max.max(gate.t_max),
        ..resolved
    };
    Ok(evaluate_point(&at_t, &gate)?.report.concurrence)
}

/// Sudden-death temperature with the default 2 K coarse scan.
pub fn esd_temperature(p: &CascadeParams, gate: &GateWindow, t_range: (f64, f64), tol: f64) -> Result<EsdResult> {
    esd_temperature_with_step(p, gate, t_range, tol, DEFAULT_SCAN_STEP)
}

/// Lowest temperature in `t_range` at which the concurrence of the mixed
/// state reaches zero: coarse scan for the first `C > 0 → C = 0` transition,
/// then bisection down to `tol`.
pub fn esd_temperature_with_step(
    p: &CascadeParams,
    gate: &GateWindow,
    t_range: (f64, f64),
    tol: f64,
    step: f64,
) -> Result<EsdResult> {
    let (lo, hi) = t_range;
    if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && hi > lo) {
        return Err(CascadeError::Parameter(format!("temperature range ({lo}, {hi}) is not ordered")));
    }
    if !(tol > 0.0 && step > 0.0) {
        return Err(CascadeError::Parameter(format!("tolerance {tol} and step {step} must be > 0")));
    }
    let n = ((hi - lo) / step).ceil() as usize;
    let temps: Vec<f64> = (0..=n).map(|k| (lo + k as f64 * step).min(hi)).collect();
    let mut scan = Vec::with_capacity(temps.len());
    for &t in &temps {
        scan.push((t, concurrence_at_temperature(p, gate, t)?));
    }

    let deaths: Vec<usize> = (1..scan.len())
        .filter(|&k| scan[k - 1].1 > SEPARABLE && scan[k].1 <= SEPARABLE)
        .collect();
    let increases = scan.windows(2).any(|w| w[1].1 > w[0].1 + 1e-10);
    let multi_crossing = deaths.len() > 1 || increases;

    let base = EsdResult {
        fss: p.fss,
        g_noise: p.g_noise,
        sudden_death_temperature: None,
        bracket: (lo, hi),
        tolerance: tol,
        status: EsdStatus::EntangledThroughout,
        multi_crossing,
        scan,
    };
    let Some(&k) = deaths.first() else {
        let status = if base.scan[0].1 > SEPARABLE {
            EsdStatus::EntangledThroughout
        } else {
            EsdStatus::SeparableThroughout
        };
        return Ok(EsdResult { status, ..base });
    };

    let (mut t_lo, mut t_hi) = (base.scan[k - 1].0, base.scan[k].0);
    while t_hi - t_lo > tol {
        let mid = 0.5 * (t_lo + t_hi);
        if concurrence_at_temperature(p, gate, mid)? > SEPARABLE {
            t_lo = mid;
        } else {
            t_hi = mid;
        }
    }
    Ok(EsdResult {
        sudden_death_temperature: Some(0.5 * (t_lo + t_hi)),
        bracket: (t_lo, t_hi),
        status: EsdStatus::Crossing,
        ..base
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tomography::{mix_total, PolarizationMatrix};

    fn werner(p: f64) -> ComplexMatrix {
        let bell = PolarizationMatrix::bell_phi_plus();
        let mut m = bell.entries().scale_real(p);
        m.add_scaled(&ComplexMatrix::identity(4), C64::new((1.0 - p) / 4.0, 0.0));
        m
    }

    #[test]
    fn concurrence_examples() {
        let bell = PolarizationMatrix::bell_phi_plus();
        assert!((concurrence(bell.entries()).unwrap() - 1.0).abs() < 1e-12);
        let white = ComplexMatrix::identity(4).scale_real(0.25);
        assert_eq!(concurrence(&white).unwrap(), 0.0);
        // Werner oracle: max(0, (3p − 1)/2).
        for p in [0.2, 1.0 / 3.0, 0.5, 0.8, 1.0] {
            let expected = ((3.0 * p - 1.0) / 2.0_f64).max(0.0);
            assert!((concurrence(&werner(p)).unwrap() - expected).abs() < 1e-9, "p = {p}");
        }
        let mixed = mix_total(&bell, 0.91, 0.45).unwrap();
        let c = concurrence(mixed.entries()).unwrap();
        let oracle = concurrence_x_oracle(mixed.entries()).unwrap();
        assert!((c - oracle).abs() < 1e-10);
        assert!((c - 0.4724).abs() < 1e-4, "{c}");
    }

    #[test]
    fn x_oracle_examples() {
        let bell = PolarizationMatrix::bell_phi_plus();
        assert!((concurrence_x_oracle(bell.entries()).unwrap() - 1.0).abs() < 1e-15);
        let diag = ComplexMatrix::from_real_diagonal(&[0.3, 0.2, 0.1, 0.4]);
        assert_eq!(concurrence_x_oracle(&diag).unwrap(), 0.0);
        assert_eq!(concurrence(&diag).unwrap(), 0.0);
        let mut not_x = diag.clone();
        not_x[(0, 1)] = C64::new(0.05, 0.0);
        not_x[(1, 0)] = C64::new(0.05, 0.0);
        assert!(matches!(concurrence_x_oracle(&not_x), Err(CascadeError::Form(_))));
    }

    #[test]
    fn invalid_state_is_flagged() {
        // A negative "probability" makes ρ₂₂ρ₃₃ a negative eigenvalue.
        let bad = ComplexMatrix::from_real_diagonal(&[0.7, -0.2, 0.3, 0.2]);
        assert!(matches!(concurrence(&bad), Err(CascadeError::NumericalValidity(_))));
        assert!(matches!(concurrence(&ComplexMatrix::identity(2)), Err(CascadeError::Dimension(_))));
    }

    #[test]
    fn fidelity_examples() {
        let bell = PolarizationMatrix::bell_phi_plus();
        assert!((fidelity_bell(bell.entries()) - 1.0).abs() < 1e-15);
        assert!((fidelity_bell(&ComplexMatrix::identity(4).scale_real(0.25)) - 0.25).abs() < 1e-15);
        let classical = ComplexMatrix::from_real_diagonal(&[0.5, 0.0, 0.0, 0.5]);
        assert_eq!(fidelity_bell(&classical), 0.5);
        let mixed = mix_total(&bell, 0.91, 0.45).unwrap();
        assert!((fidelity_bell(mixed.entries()) - 0.73621).abs() < 1e-5);
    }

    #[test]
    fn purity_bounds() {
        assert!((purity(PolarizationMatrix::bell_phi_plus().entries()) - 1.0).abs() < 1e-15);
        assert!((purity(&ComplexMatrix::identity(4).scale_real(0.25)) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn exp_window_limits() {
        assert_eq!(exp_window(C64::new(0.0, 0.0), 0.3, 0.7), C64::new(0.7, 0.0));
        let lambda = C64::new(-1.4, 3.8);
        let far = exp_window(lambda, 0.0, 200.0);
        let limit = C64::new(1.0, 0.0) / (-lambda);
        assert!((far - limit).norm() < 1e-14);
        // Both sides of the series switch at |λw| = 1e-5 against a long series.
        let dir = C64::new(-0.6, 0.8);
        let w = 0.5;
        for scale in [0.999e-5, 1.001e-5, 3e-5] {
            let lambda = dir * (scale / w);
            let z = lambda * w;
            let mut term = C64::new(1.0, 0.0);
            let mut series = C64::new(0.0, 0.0);
            for k in 1..12 {
                series += term / k as f64;
                term *= z / k as f64;
            }
            let reference = (lambda * 0.2).exp() * series * w;
            assert!((exp_window(lambda, 0.2, w) - reference).norm() < 1e-10 * w);
        }
    }

    #[test]
    fn population_window_against_quadrature() {
        let p = CascadeParams { temperature: 40.0, ..CascadeParams::default() };
        let ph = phonon_rates(&p).unwrap();
        let (a, w) = (0.3, 1.7);
        let got = exciton_population_window(&p, a, w).unwrap();
        // Midpoint-rule integration of the Euler-stepped rate equations.
        let n = 200_000;
        let h = w / n as f64;
        let mut sum = [[0.0; 2]; 2];
        for start in 0..2 {
            let mut pop = [0.0; 2];
            pop[start] = 1.0;
            let substeps = 20_000;
            let dt = a / substeps as f64;
            let deriv = |q: [f64; 2]| {
                [
                    -(p.gamma20 + ph.gamma21) * q[0] + ph.gamma12 * q[1],
                    ph.gamma21 * q[0] - (p.gamma10 + ph.gamma12) * q[1],
                ]
            };
            let rk4 = |q: [f64; 2], dt: f64| {
                let k1 = deriv(q);
                let k2 = deriv([q[0] + 0.5 * dt * k1[0], q[1] + 0.5 * dt * k1[1]]);
                let k3 = deriv([q[0] + 0.5 * dt * k2[0], q[1] + 0.5 * dt * k2[1]]);
                let k4 = deriv([q[0] + dt * k3[0], q[1] + dt * k3[1]]);
                [
                    q[0] + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
                    q[1] + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
                ]
            };
            for _ in 0..substeps {
                pop = rk4(pop, dt);
            }
            pop = rk4(pop, 0.5 * h);
            for _ in 0..n {
                sum[0][start] += pop[0] * h;
                sum[1][start] += pop[1] * h;
                pop = rk4(pop, h);
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                assert!((got[i][j] - sum[i][j]).abs() < 1e-8, "{i}{j}: {} vs {}", got[i][j], sum[i][j]);
            }
        }
    }
}
