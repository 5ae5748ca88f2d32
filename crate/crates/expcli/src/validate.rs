//! Invariant checks over randomly drawn parameter sets.

use std::time::{Duration, Instant};

use num_complex::Complex64 as C64;
use qdcascade::cascade::{build_liouvillian, phonon_rates};
use qdcascade::correlator::biexciton_initial_state;
use qdcascade::linalg::eigenvalues_hermitian;
use qdcascade::metrics::{concurrence, concurrence_x_oracle};
use qdcascade::{CascadeParams, ComplexMatrix, CONSTANTS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{ExpError, Result};
use crate::sweep::{run_point, GateSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// Pass when `worst <= tolerance`.
    Upper,
    /// Pass when `worst >= -tolerance`.
    Lower,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub worst: f64,
    pub tolerance: f64,
    pub bound: Bound,
    pub worst_set: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub seed: u64,
    pub sets: usize,
    pub elapsed_seconds: f64,
    pub checks: Vec<CheckOutcome>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn elapsed(&self) -> Duration {
        Duration::from_secs_f64(self.elapsed_seconds)
    }
}

const CHECKS: [(&str, f64, Bound); 7] = [
    ("trace_preservation", 1e-9, Bound::Upper),
    ("hermiticity", 1e-10, Bound::Upper),
    ("positivity", 1e-9, Bound::Lower),
    ("x_form_offdiagonal", 1e-8, Bound::Upper),
    ("detailed_balance", 1e-12, Bound::Upper),
    ("local_unitary_concurrence", 1e-9, Bound::Upper),
    ("x_oracle_agreement", 1e-8, Bound::Upper),
];

/// One random draw: model parameters plus gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomSet {
    pub params: CascadeParams,
    pub gate: GateSpec,
    pub local_unitaries: [[f64; 4]; 2],
    pub evolve_time: f64,
}

/// The `index`-th parameter set of the stream seeded by `seed`.
///
/// Noise weights are drawn from [0.05, 1]; a full-rank mixed state keeps the
/// spin-flip eigenvalues away from zero, where square roots amplify
/// rounding beyond the invariance tolerance.
pub fn random_set(seed: u64, index: usize) -> RandomSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let mut angles = || [0.0; 4].map(|_: f64| rng.gen_range(0.0..std::f64::consts::TAU));
    let local_unitaries = [angles(), angles()];
    let params = CascadeParams {
        gamma32: rng.gen_range(0.3..3.0),
        gamma31: rng.gen_range(0.3..3.0),
        gamma20: rng.gen_range(0.3..3.0),
        gamma10: rng.gen_range(0.3..3.0),
        fss: if rng.gen_bool(0.05) { 0.0 } else { rng.gen_range(0.0..6.0) },
        temperature: if rng.gen_bool(0.05) { 0.0 } else { rng.gen_range(0.0..150.0) },
        kappa0: rng.gen_range(0.0..1e-3),
        eta: rng.gen_range(0.0..=1.0),
        g_noise: rng.gen_range(0.05..=1.0),
        biexciton_energy: rng.gen_range(-5000.0..5000.0),
    };
    let gate = GateSpec {
        tau_g: if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.0..2.0) },
        w_g: rng.gen_range(0.02..2.0),
    };
    RandomSet {
        params,
        gate,
        local_unitaries,
        evolve_time: rng.gen_range(0.0..10.0),
    }
}

fn su2(a: [f64; 4]) -> ComplexMatrix {
    let [theta, phi, chi, alpha] = a;
    let g = C64::from_polar(1.0, alpha);
    let (s, c) = (theta / 2.0).sin_cos();
    ComplexMatrix::from_row_major(vec![
        g * C64::from_polar(c, phi),
        g * C64::from_polar(s, chi),
        -g * C64::from_polar(s, -chi),
        g * C64::from_polar(c, -phi),
    ])
    .expect("2x2")
}

/// The seven check values for one set, in `CHECKS` order.
pub fn evaluate_set(set: &RandomSet) -> Result<[f64; 7]> {
    let p = &set.params;
    let l = build_liouvillian(p)?;
    let evolved = l.exp(set.evolve_time)?.apply(&biexciton_initial_state());
    let trace_err = (evolved.trace() - C64::new(1.0, 0.0)).norm();

    let out = run_point(p, set.gate)?;
    let rho = out.total.entries();
    let pol_trace_err = (out.pol.entries().trace() - C64::new(1.0, 0.0)).norm();

    let herm = rho.hermiticity_defect().max(out.pol.entries().hermiticity_defect());
    let min_eig = eigenvalues_hermitian(rho)?[3];

    let mut x_off: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            if i != j && !matches!((i, j), (0, 3) | (3, 0)) {
                x_off = x_off.max(rho[(i, j)].norm());
            }
        }
    }

    let ph = phonon_rates(p)?;
    let balance = if ph.degenerate || p.temperature == 0.0 {
        ph.gamma12.abs()
    } else {
        let boltzmann = (-p.fss / (CONSTANTS.k_b * p.temperature)).exp();
        (ph.gamma12 / ph.gamma21 - boltzmann).abs()
    };

    let c = concurrence(rho)?;
    let u = su2(set.local_unitaries[0]).kron(&su2(set.local_unitaries[1]));
    let rotated = &(&u * rho) * &u.adjoint();
    let lu = (concurrence(&rotated)? - c).abs();
    let oracle = (concurrence_x_oracle(rho)? - c).abs();

    Ok([trace_err.max(pol_trace_err), herm, min_eig, x_off, balance, lu, oracle])
}

pub fn run_validation(seed: u64, sets: usize) -> Result<ValidationReport> {
    let start = Instant::now();
    let samples: Vec<Result<[f64; 7]>> = (0..sets)
        .into_par_iter()
        .map(|k| {
            let set = random_set(seed, k);
            evaluate_set(&set).map_err(|e| match e {
                ExpError::Core(source) | ExpError::Point { source, .. } => ExpError::Point {
                    context: format!("random set {k} of seed {seed}: {set:?}"),
                    source,
                },
                other => other,
            })
        })
        .collect();
    let samples = samples.into_iter().collect::<Result<Vec<_>>>()?;

    let checks = CHECKS
        .iter()
        .enumerate()
        .map(|(i, &(name, tolerance, bound))| {
            let values = samples.iter().map(|s| s[i]);
            let (worst_set, worst) = match bound {
                Bound::Upper => values.enumerate().fold((0, f64::NEG_INFINITY), |a, (k, v)| {
                    if v > a.1 || v.is_nan() { (k, v) } else { a }
                }),
                Bound::Lower => values.enumerate().fold((0, f64::INFINITY), |a, (k, v)| {
                    if v < a.1 || v.is_nan() { (k, v) } else { a }
                }),
            };
            let passed = match bound {
                Bound::Upper => worst <= tolerance,
                Bound::Lower => worst >= -tolerance,
            };
            CheckOutcome { name, worst, tolerance, bound, worst_set, passed }
        })
        .collect();
    Ok(ValidationReport {
        seed,
        sets,
        elapsed_seconds: start.elapsed().as_secs_f64(),
        checks,
    })
}
