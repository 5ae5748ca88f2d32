//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use qdcascade::metrics::{concurrence, concurrence_at_temperature, esd_temperature, rho14_analytic};
use qdcascade::tomography::mix_total;
use qdcascade::{evaluate_point, CascadeParams, ComplexMatrix, EsdStatus, GateWindow, PolarizationMatrix, CONSTANTS};
use qdcascade_expcli::validate::run_validation;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn fidelity(p: &CascadeParams, tau_g: f64, w_g: f64) -> f64 {
    let gate = GateWindow::new(p, tau_g, w_g).unwrap();
    evaluate_point(p, &gate).unwrap().report.fidelity
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn reference_fidelity() -> Outcome {
    let (f, dt) = timed(|| fidelity(&CascadeParams::default(), 0.0, 0.049));
    let msg = format!("F = {f:.5} in {:.3} s", dt.as_secs_f64());
    if (f - 0.73).abs() <= 0.02 && dt < Duration::from_secs(10) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn wide_gate_fidelity() -> Outcome {
    let p = CascadeParams::default();
    let wide: Vec<f64> = [5.0, 7.5, 10.0, 20.0].iter().map(|&w| fidelity(&p, 0.0, w)).collect();
    let n = 80;
    let (lo, hi): (f64, f64) = (0.049, 5.0);
    let grid: Vec<f64> = (1..=n).map(|k| lo * (hi / lo).powf(k as f64 / n as f64)).collect();
    let values: Vec<f64> = grid.iter().map(|&w| fidelity(&p, 0.0, w)).collect();
    let first = fidelity(&p, 0.0, lo);
    let mut crossings = 0;
    let mut prev = first;
    for &v in &values {
        if (prev - 0.5).signum() != (v - 0.5).signum() {
            crossings += 1;
        }
        prev = v;
    }
    let max_wide = wide.iter().cloned().fold(f64::MIN, f64::max);
    let msg = format!("max F(w_g >= 5) = {max_wide:.4}, crossings of 0.5 in (0.049, 5]: {crossings}");
    if max_wide < 0.5 && crossings == 1 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Mean spacing of the local maxima of F(τ_g), refined by parabolic fits.
fn peak_spacing(fss: f64) -> Option<f64> {
    let p = CascadeParams { fss, ..CascadeParams::default() };
    let h = 0.01;
    let taus: Vec<f64> = (0..=600).map(|k| k as f64 * h).collect();
    let f: Vec<f64> = taus.iter().map(|&t| fidelity(&p, t, 0.5)).collect();
    let peaks: Vec<f64> = (1..f.len() - 1)
        .filter(|&k| f[k] > f[k - 1] && f[k] >= f[k + 1])
        .map(|k| {
            let denom = f[k - 1] - 2.0 * f[k] + f[k + 1];
            taus[k] + 0.5 * h * (f[k - 1] - f[k + 1]) / denom
        })
        .collect();
    if peaks.len() < 2 {
        return None;
    }
    Some((peaks[peaks.len() - 1] - peaks[0]) / (peaks.len() - 1) as f64)
}

fn beat_period() -> Outcome {
    let period = |s: f64| 2.0 * std::f64::consts::PI * CONSTANTS.hbar / s;
    let (Some(a), Some(b)) = (peak_spacing(2.5), peak_spacing(3.6)) else {
        return Err("fewer than two fidelity maxima".into());
    };
    let ea = (a / period(2.5) - 1.0).abs();
    let eb = (b / period(3.6) - 1.0).abs();
    let ratio = a / b;
    let er = (ratio / (3.6 / 2.5) - 1.0).abs();
    let msg = format!(
        "spacing {a:.4} ns (expected {:.4}), {b:.4} ns (expected {:.4}), ratio {ratio:.4}",
        period(2.5),
        period(3.6)
    );
    if ea <= 0.03 && eb <= 0.03 && er <= 0.02 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn coherence_closed_form() -> Outcome {
    let (worst, dt) = timed(|| {
        let mut worst: f64 = 0.0;
        for temperature in [4.0, 40.0] {
            let p = CascadeParams { temperature, ..CascadeParams::default() };
            for tau_g in [0.0, 0.25, 0.5, 1.0, 2.0] {
                for w_g in [0.049, 0.1, 0.3, 1.0, 3.0] {
                    let gate = GateWindow::new(&p, tau_g, w_g).unwrap();
                    let numeric = evaluate_point(&p, &gate).unwrap().pol.get(0, 3);
                    let exact = rho14_analytic(&p, &gate).unwrap().normalized;
                    worst = worst.max((numeric - exact).norm() / exact.norm());
                }
            }
        }
        worst
    });
    let msg = format!("worst relative deviation {worst:.2e} over 50 points in {:.2} s", dt.as_secs_f64());
    if worst <= 1e-6 && dt < Duration::from_secs(60) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn random_invariants() -> Outcome {
    let report = run_validation(20240611, 1000).map_err(|e| e.to_string())?;
    let failed: Vec<String> = report
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{} worst {:e}", c.name, c.worst))
        .collect();
    let msg = format!("7 invariants over 1000 sets in {:.2} s", report.elapsed_seconds);
    if failed.is_empty() && report.elapsed() < Duration::from_secs(120) {
        Ok(msg)
    } else {
        Err(format!("{msg}; failed: {}", failed.join(", ")))
    }
}

fn sudden_death() -> Outcome {
    let base = CascadeParams { g_noise: 0.45, ..CascadeParams::default() };
    let gate_for = |p: &CascadeParams| GateWindow::new(p, 0.5, 0.1).unwrap();
    let mut notes = vec![];
    let mut ok = true;

    let temps: Vec<f64> = (0..=150).map(|k| 2.0 * k as f64).collect();
    let cs: Vec<f64> = temps
        .iter()
        .map(|&t| concurrence_at_temperature(&base, &gate_for(&base), t).unwrap())
        .collect();
    let monotone = cs.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    let reaches_zero = cs.contains(&0.0);
    ok &= monotone && reaches_zero;
    notes.push(format!("(a) non-increasing {monotone}, reaches 0 {reaches_zero}"));

    let esd = |fss: f64, g: f64, t_max: f64| {
        let p = CascadeParams { fss, g_noise: g, ..base };
        esd_temperature(&p, &gate_for(&p), (0.0, t_max), 0.05).unwrap()
    };
    let t_esd: Vec<f64> = [1.0, 2.5, 3.5, 5.0]
        .iter()
        .map(|&s| esd(s, 0.45, 1000.0).sudden_death_temperature.unwrap_or(f64::INFINITY))
        .collect();
    let ordered = t_esd.windows(2).all(|w| w[1] <= w[0]);
    ok &= ordered;
    notes.push(format!("(b) T_ESD = {t_esd:.1?}"));

    let noiseless: Vec<bool> = [3.5, 5.0]
        .iter()
        .map(|&s| esd(s, 0.0, 600.0).status == EsdStatus::Crossing)
        .collect();
    ok &= noiseless.iter().all(|&b| b);
    notes.push(format!("(c) g = 0 crossings {noiseless:?}"));

    let small = CascadeParams { fss: 0.5, ..base };
    let c4 = concurrence_at_temperature(&small, &gate_for(&small), 4.0).unwrap();
    let c20 = concurrence_at_temperature(&small, &gate_for(&small), 20.0).unwrap();
    ok &= (c20 - c4).abs() < 0.1;
    notes.push(format!("(d) |C(20 K) - C(4 K)| = {:.4}", (c20 - c4).abs()));

    let msg = notes.join("; ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn concurrence_examples() -> Outcome {
    let bell = PolarizationMatrix::bell_phi_plus();
    let c_bell = concurrence(bell.entries()).unwrap();
    let c_white = concurrence(&ComplexMatrix::identity(4).scale_real(0.25)).unwrap();
    let mut werner = bell.entries().scale_real(0.5);
    werner.add_scaled(&ComplexMatrix::identity(4), num_complex::Complex64::new(0.125, 0.0));
    let c_werner = concurrence(&werner).unwrap();
    let c_mixed = concurrence(mix_total(&bell, 0.91, 0.45).unwrap().entries()).unwrap();
    let msg = format!("Bell {c_bell:.10}, I/4 {c_white:.10}, Werner {c_werner:.10}, mixed Bell {c_mixed:.5}");
    if (c_bell - 1.0).abs() < 1e-9
        && c_white.abs() < 1e-12
        && (c_werner - 0.25).abs() < 1e-9
        && (c_mixed - 0.4724).abs() < 1e-4
    {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn reproducible_figure() -> Outcome {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut outputs = vec![];
    for dir in &dirs {
        let status = Command::new(env!("CARGO_BIN_EXE_qdcascade"))
            .args(["fig", "fig2a"])
            .env("QDCASCADE_OUT_DIR", dir.path())
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(format!("fig2a exited with {}", status.status));
        }
        outputs.push(std::fs::read(dir.path().join("fig2a.csv")).map_err(|e| e.to_string())?);
    }
    let msg = format!("two runs, {} bytes each", outputs[0].len());
    if outputs[0] == outputs[1] && !outputs[0].is_empty() {
        Ok(msg)
    } else {
        Err(format!("{msg}: outputs differ"))
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 reference fidelity", reference_fidelity),
        ("2 wide-gate fidelity", wide_gate_fidelity),
        ("3 delay beat period", beat_period),
        ("4 coherence closed form", coherence_closed_form),
        ("5 random-parameter invariants", random_invariants),
        ("6 sudden death", sudden_death),
        ("7 concurrence examples", concurrence_examples),
        ("8 reproducible figure output", reproducible_figure),
    ];
    let mut failures = 0;
    for (name, check) in criteria {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(msg) => println!("PASS criterion {name}: {msg}"),
            Err(msg) => {
                failures += 1;
                println!("FAIL criterion {name}: {msg}");
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", 8 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
