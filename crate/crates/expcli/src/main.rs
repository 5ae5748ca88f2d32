use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qdcascade::metrics::esd_temperature_with_step;
use qdcascade::GateWindow;
use qdcascade_expcli::config::{parse_override, Config};
use qdcascade_expcli::emit::{csv_string, emit_csv, emit_json, emit_svg, write_text};
use qdcascade_expcli::presets::{run_preset, PRESET_NAMES};
use qdcascade_expcli::svg::ChartKind;
use qdcascade_expcli::sweep::{run_point, run_sweep};
use qdcascade_expcli::validate::{run_validation, Bound};
use qdcascade_expcli::{ExpError, Result};
use serde_json::json;

/// Entanglement of quantum-dot cascade photon pairs: single points,
/// sweeps, sudden-death searches and figure presets.
#[derive(Debug, Parser)]
#[command(name = "qdcascade", version)]
struct Cli {
    /// TOML configuration file.
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,

    /// Parameter override `name=value`; may be repeated. Applied after the file.
    #[arg(short = 's', long = "set", global = true, value_name = "NAME=VALUE")]
    overrides: Vec<String>,

    /// Directory for output files given as relative paths.
    #[arg(long, global = true, env = "QDCASCADE_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one parameter point and print the result as JSON.
    Simulate {
        /// Write the JSON to this file instead of stdout.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run the grid sweep described by the `[sweep]` section.
    Sweep {
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// `line` or `heatmap`.
        #[arg(long)]
        svg_kind: Option<String>,
    },
    /// Find the entanglement sudden-death temperature.
    Esd {
        #[arg(long, default_value_t = 0.0)]
        t_min: f64,
        #[arg(long, default_value_t = 600.0)]
        t_max: f64,
        #[arg(long, default_value_t = 0.05)]
        tol: f64,
        /// Coarse scan step, K.
        #[arg(long, default_value_t = 2.0)]
        step: f64,
        /// Include the coarse scan samples in the output.
        #[arg(long)]
        with_scan: bool,
    },
    /// Regenerate a figure preset as CSV and SVG in the output directory.
    Fig {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(PRESET_NAMES))]
        preset: String,
    },
    /// Check physical invariants over random parameter sets.
    Validate {
        #[arg(long, default_value_t = 1000)]
        sets: usize,
        #[arg(long, default_value_t = 20240611)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn resolve(out_dir: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        out_dir.join(path)
    }
}

fn load_config(cli: &Cli) -> Result<Config> {
    let mut config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let overrides = cli
        .overrides
        .iter()
        .map(|s| parse_override(s))
        .collect::<Result<Vec<_>>>()?;
    config.apply_overrides(&overrides);
    Ok(config)
}

fn to_json_text(value: &serde_json::Value) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| ExpError::Validation(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

fn matrix_json(m: &qdcascade::ComplexMatrix) -> serde_json::Value {
    let rows: Vec<Vec<[f64; 2]>> = (0..4)
        .map(|i| (0..4).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect();
    json!(rows)
}

fn run(cli: Cli) -> Result<()> {
    let config = load_config(&cli)?;
    match &cli.command {
        Command::Simulate { json: path } => {
            let p = config.params();
            let out = run_point(&p, config.gate)?;
            out.total.validate()?;
            let value = json!({
                "params": p,
                "gate": config.gate,
                "concurrence": out.report.concurrence,
                "fidelity": out.report.fidelity,
                "purity": out.report.purity,
                "normalization": out.raw.normalization,
                "rho_pol": matrix_json(out.pol.entries()),
                "rho_total": matrix_json(out.total.entries()),
            });
            let text = to_json_text(&value)?;
            match path {
                Some(path) => write_text(&resolve(&cli.out_dir, path), &text)?,
                None => print!("{text}"),
            }
        }
        Command::Sweep { csv, json, svg, svg_kind } => {
            let spec = config.sweep_spec()?;
            let kind = match svg_kind {
                Some(k) => ChartKind::parse(k)?,
                None => config.output.svg_kind.unwrap_or(ChartKind::Line),
            };
            let csv = csv.clone().or(config.output.csv.clone());
            let json = json.clone().or(config.output.json.clone());
            let svg = svg.clone().or(config.output.svg.clone());
            if svg.is_some() && spec.axes.len() > 2 {
                return Err(ExpError::Config(format!(
                    "SVG output supports at most 2 axes, sweep has {}",
                    spec.axes.len()
                )));
            }
            let result = run_sweep(&spec)?;
            if csv.is_none() && json.is_none() && svg.is_none() {
                print!("{}", csv_string(&result));
            }
            if let Some(path) = csv {
                emit_csv(&result, &resolve(&cli.out_dir, &path))?;
            }
            if let Some(path) = json {
                emit_json(&result, &resolve(&cli.out_dir, &path))?;
            }
            if let Some(path) = svg {
                emit_svg(&result, &resolve(&cli.out_dir, &path), kind)?;
            }
        }
        Command::Esd { t_min, t_max, tol, step, with_scan } => {
            let p = config.params();
            let gate = GateWindow::new(&p, config.gate.tau_g, config.gate.w_g)?;
            let mut result = esd_temperature_with_step(&p, &gate, (*t_min, *t_max), *tol, *step)?;
            if !with_scan {
                result.scan.clear();
            }
            let value = serde_json::to_value(&result).map_err(|e| ExpError::Validation(e.to_string()))?;
            print!("{}", to_json_text(&value)?);
        }
        Command::Fig { preset } => {
            for path in run_preset(preset, &cli.out_dir)? {
                println!("{}", path.display());
            }
        }
        Command::Validate { sets, seed } => {
            let report = run_validation(*seed, *sets)?;
            for c in &report.checks {
                let relation = match c.bound {
                    Bound::Upper => format!("<= {:e}", c.tolerance),
                    Bound::Lower => format!(">= -{:e}", c.tolerance),
                };
                println!(
                    "{} {:<28} worst {:+.3e} {relation} (set {})",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.worst,
                    c.worst_set
                );
            }
            println!("{} sets, seed {}, {:.2} s", report.sets, report.seed, report.elapsed_seconds);
            if !report.passed() {
                return Err(ExpError::Validation("one or more invariants violated".into()));
            }
        }
    }
    Ok(())
}
