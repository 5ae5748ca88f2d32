//! Named figure presets.

use std::path::{Path, PathBuf};

use qdcascade::metrics::esd_temperature;
use qdcascade::{CascadeParams, EsdResult, EsdStatus, GateWindow};
use rayon::prelude::*;

use crate::emit::{emit_csv, emit_svg, write_text};
use crate::error::{ExpError, Result};
use crate::format::format_number;
use crate::svg::ChartKind;
use crate::sweep::{run_sweep, Axis, GateSpec, Metric, ParamName, SweepSpec};

pub const PRESET_NAMES: [&str; 10] = [
    "fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig4a", "fig4b", "fig4c", "fig4d", "fig5",
];

pub enum Preset {
    Sweep { spec: SweepSpec, chart: ChartKind },
    Esd(EsdSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EsdSpec {
    pub base: CascadeParams,
    pub gate: GateSpec,
    pub fss: Vec<f64>,
    pub g_noise: Vec<f64>,
    pub t_range: (f64, f64),
    pub tolerance: f64,
}

fn axis(name: ParamName, values: Vec<f64>) -> Axis {
    Axis::new(name, values).expect("preset axes are non-empty and finite")
}

fn lin(name: ParamName, start: f64, stop: f64, n: usize) -> Axis {
    Axis::linspace(name, start, stop, n).expect("preset axes are non-empty and finite")
}

fn sweep(axes: Vec<Axis>, gate: GateSpec, outputs: Vec<Metric>, chart: ChartKind) -> Preset {
    Preset::Sweep {
        spec: SweepSpec {
            axes,
            base: CascadeParams::default(),
            gate,
            outputs,
        },
        chart,
    }
}

pub fn preset(name: &str) -> Result<Preset> {
    use Metric::{Concurrence, Fidelity};
    use ParamName::*;
    let both = || vec![Fidelity, Concurrence];
    let gate = |tau_g, w_g| GateSpec { tau_g, w_g };
    Ok(match name {
        "fig2a" => sweep(vec![lin(WG, 0.01, 5.0, 250)], gate(0.0, 0.049), both(), ChartKind::Line),
        "fig2b" | "fig2c" => {
            let s = if name == "fig2b" { 2.5 } else { 3.6 };
            sweep(
                vec![axis(Fss, vec![s]), lin(TauG, 0.0, 4.0, 401)],
                gate(0.0, 0.5),
                both(),
                ChartKind::Line,
            )
        }
        "fig3a" => sweep(
            vec![lin(WG, 0.02, 1.0, 25), lin(Temperature, 0.0, 100.0, 26)],
            gate(0.0, 0.049),
            vec![Concurrence],
            ChartKind::Heatmap,
        ),
        "fig3b" => sweep(
            vec![lin(TauG, 0.0, 2.0, 26), lin(Temperature, 0.0, 100.0, 26)],
            gate(0.0, 0.1),
            vec![Concurrence],
            ChartKind::Heatmap,
        ),
        "fig4a" | "fig4b" | "fig4c" | "fig4d" => {
            let (w_g, tau_g) = match name {
                "fig4a" => (0.1, 0.0),
                "fig4b" => (0.1, 0.5),
                "fig4c" => (0.5, 0.0),
                _ => (0.5, 0.5),
            };
            sweep(
                vec![axis(Fss, vec![0.5, 2.5, 3.5, 5.0]), lin(Temperature, 0.0, 200.0, 101)],
                gate(tau_g, w_g),
                vec![Concurrence],
                ChartKind::Line,
            )
        }
        "fig5" => Preset::Esd(EsdSpec {
            base: CascadeParams::default(),
            gate: gate(0.5, 0.1),
            fss: (0..=22).map(|k| 0.5 + 0.25 * k as f64).collect(),
            g_noise: vec![0.0, 0.45, 1.0],
            t_range: (0.0, 600.0),
            tolerance: 0.05,
        }),
        other => {
            return Err(ExpError::Config(format!(
                "unknown preset '{other}', expected one of {}",
                PRESET_NAMES.join(", ")
            )))
        }
    })
}

/// Runs the ESD search for every `(g, S)` pair; rows are ordered by `g`
/// then `S`.
pub fn run_esd_grid(spec: &EsdSpec) -> Result<Vec<EsdResult>> {
    let pairs: Vec<(f64, f64)> = spec
        .g_noise
        .iter()
        .flat_map(|&g| spec.fss.iter().map(move |&s| (g, s)))
        .collect();
    pairs
        .par_iter()
        .map(|&(g, s)| {
            let p = CascadeParams { fss: s, g_noise: g, ..spec.base };
            let annotate = |source| ExpError::Point {
                context: format!("fss = {s}, g_noise = {g}, tau_g = {}, w_g = {}", spec.gate.tau_g, spec.gate.w_g),
                source,
            };
            let gate = GateWindow::new(&p, spec.gate.tau_g, spec.gate.w_g).map_err(annotate)?;
            esd_temperature(&p, &gate, spec.t_range, spec.tolerance).map_err(annotate)
        })
        .collect()
}

pub fn esd_csv(results: &[EsdResult]) -> String {
    let mut out = String::from("fss,g_noise,esd_temperature,bracket_lo,bracket_hi,status,multi_crossing\n");
    for r in results {
        let status = match r.status {
            EsdStatus::Crossing => "crossing",
            EsdStatus::EntangledThroughout => "entangled_throughout",
            EsdStatus::SeparableThroughout => "separable_throughout",
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            format_number(r.fss),
            format_number(r.g_noise),
            r.sudden_death_temperature.map(format_number).unwrap_or_default(),
            format_number(r.bracket.0),
            format_number(r.bracket.1),
            status,
            r.multi_crossing
        ));
    }
    out
}

/// Runs a preset and writes `<name>.csv` and `<name>.svg` into `out_dir`.
pub fn run_preset(name: &str, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let csv = out_dir.join(format!("{name}.csv"));
    let svg = out_dir.join(format!("{name}.svg"));
    match preset(name)? {
        Preset::Sweep { spec, chart } => {
            let result = run_sweep(&spec)?;
            emit_csv(&result, &csv)?;
            emit_svg(&result, &svg, chart)?;
        }
        Preset::Esd(spec) => {
            let results = run_esd_grid(&spec)?;
            write_text(&csv, &esd_csv(&results))?;
            let chart = esd_chart(&spec, &results);
            emit_svg(&chart, &svg, ChartKind::Line)?;
        }
    }
    Ok(vec![csv, svg])
}

/// ESD temperature vs S, one curve per noise weight. Missing crossings are
/// left out of the polyline.
fn esd_chart(spec: &EsdSpec, results: &[EsdResult]) -> crate::sweep::SweepResult {
    crate::sweep::SweepResult {
        header: vec!["g_noise".into(), "fss".into(), "esd_temperature".into()],
        axes: vec![
            axis(ParamName::GNoise, spec.g_noise.clone()),
            axis(ParamName::Fss, spec.fss.clone()),
        ],
        rows: results
            .iter()
            .map(|r| vec![r.g_noise, r.fss, r.sudden_death_temperature.unwrap_or(f64::NAN)])
            .collect(),
    }
}
