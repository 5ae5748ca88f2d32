//! Grid sweeps over model and gate parameters.

use std::fmt;

use qdcascade::{evaluate_point, CascadeParams, GateWindow, PointOutcome};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ExpError, Result};

/// Detection gate as configured: delay and width in ns. The integration
/// resolution is derived per point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GateSpec {
    pub tau_g: f64,
    pub w_g: f64,
}

impl Default for GateSpec {
    fn default() -> Self {
        GateSpec { tau_g: 0.0, w_g: 0.049 }
    }
}

/// Sweepable inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamName {
    Gamma32,
    Gamma31,
    Gamma20,
    Gamma10,
    Fss,
    Temperature,
    Kappa0,
    Eta,
    GNoise,
    BiexcitonEnergy,
    TauG,
    WG,
}

impl ParamName {
    pub const ALL: [ParamName; 12] = [
        ParamName::Gamma32,
        ParamName::Gamma31,
        ParamName::Gamma20,
        ParamName::Gamma10,
        ParamName::Fss,
        ParamName::Temperature,
        ParamName::Kappa0,
        ParamName::Eta,
        ParamName::GNoise,
        ParamName::BiexcitonEnergy,
        ParamName::TauG,
        ParamName::WG,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ParamName::Gamma32 => "gamma32",
            ParamName::Gamma31 => "gamma31",
            ParamName::Gamma20 => "gamma20",
            ParamName::Gamma10 => "gamma10",
            ParamName::Fss => "fss",
            ParamName::Temperature => "temperature",
            ParamName::Kappa0 => "kappa0",
            ParamName::Eta => "eta",
            ParamName::GNoise => "g_noise",
            ParamName::BiexcitonEnergy => "biexciton_energy",
            ParamName::TauG => "tau_g",
            ParamName::WG => "w_g",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.as_str() == name)
            .ok_or_else(|| ExpError::Config(format!("unknown parameter name '{name}'")))
    }

    pub fn apply(self, p: &mut CascadeParams, gate: &mut GateSpec, value: f64) {
        match self {
            ParamName::Gamma32 => p.gamma32 = value,
            ParamName::Gamma31 => p.gamma31 = value,
            ParamName::Gamma20 => p.gamma20 = value,
            ParamName::Gamma10 => p.gamma10 = value,
            ParamName::Fss => p.fss = value,
            ParamName::Temperature => p.temperature = value,
            ParamName::Kappa0 => p.kappa0 = value,
            ParamName::Eta => p.eta = value,
            ParamName::GNoise => p.g_noise = value,
            ParamName::BiexcitonEnergy => p.biexciton_energy = value,
            ParamName::TauG => gate.tau_g = value,
            ParamName::WG => gate.w_g = value,
        }
    }
}

impl fmt::Display for ParamName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Output columns. `Rho14*` and `Diag` describe the gated polarization
/// matrix before mixing; the others describe the mixed state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Concurrence,
    Fidelity,
    Purity,
    Rho14Abs,
    Rho14Arg,
    Diag,
}

impl Metric {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "concurrence" => Ok(Metric::Concurrence),
            "fidelity" => Ok(Metric::Fidelity),
            "purity" => Ok(Metric::Purity),
            "rho14_abs" => Ok(Metric::Rho14Abs),
            "rho14_arg" => Ok(Metric::Rho14Arg),
            "diag" => Ok(Metric::Diag),
            other => Err(ExpError::Config(format!("unknown metric '{other}'"))),
        }
    }

    pub fn columns(self) -> Vec<&'static str> {
        match self {
            Metric::Concurrence => vec!["concurrence"],
            Metric::Fidelity => vec!["fidelity"],
            Metric::Purity => vec!["purity"],
            Metric::Rho14Abs => vec!["rho14_abs"],
            Metric::Rho14Arg => vec!["rho14_arg"],
            Metric::Diag => vec!["diag_hh", "diag_hv", "diag_vh", "diag_vv"],
        }
    }

    fn values(self, out: &PointOutcome) -> Vec<f64> {
        let pol = out.pol.entries();
        match self {
            Metric::Concurrence => vec![out.report.concurrence],
            Metric::Fidelity => vec![out.report.fidelity],
            Metric::Purity => vec![out.report.purity],
            Metric::Rho14Abs => vec![pol[(0, 3)].norm()],
            Metric::Rho14Arg => vec![pol[(0, 3)].arg()],
            Metric::Diag => (0..4).map(|i| pol[(i, i)].re).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: ParamName,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn new(name: ParamName, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(ExpError::Config(format!("axis '{name}' has no values")));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(ExpError::Config(format!("axis '{name}' has non-finite value {v}")));
        }
        Ok(Axis { name, values })
    }

    /// `count` evenly spaced values from `start` to `stop` inclusive.
    pub fn linspace(name: ParamName, start: f64, stop: f64, count: usize) -> Result<Self> {
        let values = match count {
            0 => vec![],
            1 => vec![start],
            n => (0..n)
                .map(|k| start + (stop - start) * k as f64 / (n - 1) as f64)
                .collect(),
        };
        Self::new(name, values)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axes: Vec<Axis>,
    pub base: CascadeParams,
    pub gate: GateSpec,
    pub outputs: Vec<Metric>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.outputs.is_empty() {
            return Err(ExpError::Config("sweep requests no outputs".into()));
        }
        for (i, a) in self.axes.iter().enumerate() {
            if self.axes[..i].iter().any(|b| b.name == a.name) {
                return Err(ExpError::Config(format!("axis '{}' declared twice", a.name)));
            }
            Axis::new(a.name, a.values.clone())?;
        }
        Ok(())
    }

    pub fn header(&self) -> Vec<String> {
        self.axes
            .iter()
            .map(|a| a.name.as_str().to_string())
            .chain(self.outputs.iter().flat_map(|m| m.columns()).map(String::from))
            .collect()
    }

    pub fn point_count(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    /// Coordinates of grid node `index`, row-major over the declared axes.
    pub fn coordinates(&self, mut index: usize) -> Vec<f64> {
        let mut coords = vec![0.0; self.axes.len()];
        for (slot, axis) in coords.iter_mut().zip(&self.axes).rev() {
            let n = axis.values.len();
            *slot = axis.values[index % n];
            index /= n;
        }
        coords
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub header: Vec<String>,
    pub axes: Vec<Axis>,
    pub rows: Vec<Vec<f64>>,
}

impl SweepResult {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

/// Full pipeline at one parameter point.
pub fn run_point(p: &CascadeParams, gate: GateSpec) -> Result<PointOutcome> {
    let annotate = |source| ExpError::Point {
        context: format!("{}, tau_g = {}, w_g = {}", describe(p), gate.tau_g, gate.w_g),
        source,
    };
    let window = GateWindow::new(p, gate.tau_g, gate.w_g).map_err(annotate)?;
    evaluate_point(p, &window).map_err(annotate)
}

fn describe(p: &CascadeParams) -> String {
    format!(
        "gamma32 = {}, gamma31 = {}, gamma20 = {}, gamma10 = {}, fss = {}, temperature = {}, \
         kappa0 = {}, eta = {}, g_noise = {}",
        p.gamma32, p.gamma31, p.gamma20, p.gamma10, p.fss, p.temperature, p.kappa0, p.eta, p.g_noise
    )
}

/// Evaluates every grid node in parallel; rows come back in declared order.
/// The first failing node (in row order) aborts the sweep.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let rows: Vec<Result<Vec<f64>>> = (0..spec.point_count())
        .into_par_iter()
        .map(|index| {
            let coords = spec.coordinates(index);
            let mut p = spec.base;
            let mut gate = spec.gate;
            for (axis, &v) in spec.axes.iter().zip(&coords) {
                axis.name.apply(&mut p, &mut gate, v);
            }
            let out = run_point(&p, gate)?;
            let mut row = coords;
            for m in &spec.outputs {
                row.extend(m.values(&out));
            }
            Ok(row)
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        header: spec.header(),
        axes: spec.axes.clone(),
        rows,
    })
}
