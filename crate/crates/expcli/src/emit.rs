//! Writers for sweep results.

use std::path::Path;

use serde_json::{json, Map, Value};

use crate::error::{ExpError, Result};
use crate::format::format_number;
use crate::svg::{render, ChartKind};
use crate::sweep::SweepResult;

pub fn csv_string(result: &SweepResult) -> String {
    let mut out = result.header.join(",");
    out.push('\n');
    for row in &result.rows {
        let cells: Vec<String> = row.iter().map(|&v| format_number(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// One object per row, keys in header order. Non-finite values become `null`.
pub fn json_value(result: &SweepResult) -> Value {
    let rows: Vec<Value> = result
        .rows
        .iter()
        .map(|row| {
            let obj: Map<String, Value> = result
                .header
                .iter()
                .zip(row)
                .map(|(k, &v)| (k.clone(), number(v)))
                .collect();
            Value::Object(obj)
        })
        .collect();
    let axes: Vec<Value> = result
        .axes
        .iter()
        .map(|a| json!({ "name": a.name.as_str(), "values": a.values }))
        .collect();
    json!({ "header": result.header, "axes": axes, "rows": rows })
}

fn number(v: f64) -> Value {
    serde_json::Number::from_f64(v).map(Value::Number).unwrap_or(Value::Null)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| ExpError::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| ExpError::io(path, e))
}

pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<()> {
    write_text(path, &csv_string(result))
}

pub fn emit_json(result: &SweepResult, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(&json_value(result))
        .map_err(|e| ExpError::Validation(e.to_string()))?;
    text.push('\n');
    write_text(path, &text)
}

pub fn emit_svg(result: &SweepResult, path: &Path, kind: ChartKind) -> Result<()> {
    write_text(path, &render(result, kind)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::{Axis, ParamName};

    fn sample() -> SweepResult {
        SweepResult {
            header: vec!["w_g".into(), "fidelity".into()],
            axes: vec![Axis::new(ParamName::WG, vec![0.049, 5.0]).unwrap()],
            rows: vec![vec![0.049, 0.7327213], vec![5.0, f64::NAN]],
        }
    }

    #[test]
    fn csv_layout() {
        assert_eq!(csv_string(&sample()), "w_g,fidelity\n0.049,0.7327213\n5,NaN\n");
        let mut empty = sample();
        empty.rows.clear();
        assert_eq!(csv_string(&empty), "w_g,fidelity\n");
    }

    #[test]
    fn json_layout() {
        let v = json_value(&sample());
        assert_eq!(v["rows"][0]["fidelity"], json!(0.7327213));
        assert_eq!(v["rows"][1]["fidelity"], Value::Null);
        assert_eq!(v["axes"][0]["name"], "w_g");
        let keys: Vec<&String> = v["rows"][0].as_object().unwrap().keys().collect();
        assert_eq!(keys, ["w_g", "fidelity"]);
    }

    #[test]
    fn unwritable_path_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        std::fs::write(&blocker, "x").unwrap();
        let err = emit_csv(&sample(), &blocker.join("out.csv")).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }
}
