//! TOML configuration.
//!
//! ```toml
//! [rates]          # 1/ns
//! gamma32 = 1.8    # XX -> X_H
//! gamma31 = 1.8    # XX -> X_V
//! gamma20 = 1.3    # X_H -> G
//! gamma10 = 1.3    # X_V -> G
//!
//! [exciton]        # μeV
//! fss = 2.5
//! biexciton_energy = 0.0
//!
//! [phonon]
//! temperature = 10.0   # K
//! kappa0 = 2e-5        # 1/(ns μeV³)
//!
//! [mixing]
//! eta = 0.91
//! g_noise = 0.45
//!
//! [gate]           # ns
//! tau_g = 0.0
//! w_g = 0.049
//!
//! [sweep]
//! outputs = ["fidelity", "concurrence"]
//! [[sweep.axes]]
//! name = "w_g"
//! start = 0.02
//! stop = 5.0
//! count = 250
//! [[sweep.axes]]
//! name = "fss"
//! values = [2.5, 3.6]
//!
//! [output]
//! csv = "out.csv"
//! json = "out.json"
//! svg = "out.svg"
//! svg_kind = "line"    # or "heatmap"
//! ```
//!
//! Every key is optional; missing keys take the defaults shown.

use std::path::{Path, PathBuf};

use qdcascade::CascadeParams;
use serde::{Deserialize, Serialize};

use crate::error::{ExpError, Result};
use crate::svg::ChartKind;
use crate::sweep::{Axis, GateSpec, Metric, ParamName, SweepSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RatesSection {
    pub gamma32: f64,
    pub gamma31: f64,
    pub gamma20: f64,
    pub gamma10: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExcitonSection {
    pub fss: f64,
    pub biexciton_energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhononSection {
    pub temperature: f64,
    pub kappa0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MixingSection {
    pub eta: f64,
    pub g_noise: f64,
}

macro_rules! defaults_from_params {
    ($($section:ident { $($field:ident),* }),*) => {
        $(impl Default for $section {
            fn default() -> Self {
                let p = CascadeParams::default();
                $section { $($field: p.$field),* }
            }
        })*
    };
}

defaults_from_params!(
    RatesSection { gamma32, gamma31, gamma20, gamma10 },
    ExcitonSection { fss, biexciton_energy },
    PhononSection { temperature, kappa0 },
    MixingSection { eta, g_noise }
);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSection {
    pub name: ParamName,
    pub values: Option<Vec<f64>>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub count: Option<usize>,
}

impl AxisSection {
    fn to_axis(&self) -> Result<Axis> {
        match (&self.values, self.start, self.stop, self.count) {
            (Some(v), None, None, None) => Axis::new(self.name, v.clone()),
            (None, Some(a), Some(b), Some(n)) => Axis::linspace(self.name, a, b, n),
            _ => Err(ExpError::Config(format!(
                "axis '{}' needs either `values` or all of `start`, `stop`, `count`",
                self.name
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub outputs: Vec<Metric>,
    pub axes: Vec<AxisSection>,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            outputs: vec![Metric::Concurrence, Metric::Fidelity],
            axes: vec![],
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub svg_kind: Option<ChartKind>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub rates: RatesSection,
    pub exciton: ExcitonSection,
    pub phonon: PhononSection,
    pub mixing: MixingSection,
    pub gate: GateSpec,
    pub sweep: SweepSection,
    pub output: OutputSection,
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| ExpError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ExpError::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            ExpError::Config(msg) => ExpError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn params(&self) -> CascadeParams {
        CascadeParams {
            gamma32: self.rates.gamma32,
            gamma31: self.rates.gamma31,
            gamma20: self.rates.gamma20,
            gamma10: self.rates.gamma10,
            fss: self.exciton.fss,
            biexciton_energy: self.exciton.biexciton_energy,
            temperature: self.phonon.temperature,
            kappa0: self.phonon.kappa0,
            eta: self.mixing.eta,
            g_noise: self.mixing.g_noise,
        }
    }

    /// Applies `name=value` overrides on top of the file values.
    pub fn apply_overrides(&mut self, overrides: &[(ParamName, f64)]) {
        let mut p = self.params();
        let mut gate = self.gate;
        for &(name, value) in overrides {
            name.apply(&mut p, &mut gate, value);
        }
        self.rates = RatesSection {
            gamma32: p.gamma32,
            gamma31: p.gamma31,
            gamma20: p.gamma20,
            gamma10: p.gamma10,
        };
        self.exciton = ExcitonSection {
            fss: p.fss,
            biexciton_energy: p.biexciton_energy,
        };
        self.phonon = PhononSection {
            temperature: p.temperature,
            kappa0: p.kappa0,
        };
        self.mixing = MixingSection { eta: p.eta, g_noise: p.g_noise };
        self.gate = gate;
    }

    pub fn sweep_spec(&self) -> Result<SweepSpec> {
        let axes = self
            .sweep
            .axes
            .iter()
            .map(AxisSection::to_axis)
            .collect::<Result<Vec<_>>>()?;
        let spec = SweepSpec {
            axes,
            base: self.params(),
            gate: self.gate,
            outputs: self.sweep.outputs.clone(),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Parses a `name=value` override.
pub fn parse_override(text: &str) -> Result<(ParamName, f64)> {
    let (name, value) = text
        .split_once('=')
        .ok_or_else(|| ExpError::Config(format!("override '{text}' is not of the form name=value")))?;
    let name = ParamName::parse(name.trim())?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| ExpError::Config(format!("override '{text}' has a non-numeric value")))?;
    if !value.is_finite() {
        return Err(ExpError::Config(format!("override '{text}' is not finite")));
    }
    Ok((name, value))
}
