//! Minimal SVG line charts and heatmaps for sweep results.
//!
//! The last axis of a sweep is the horizontal coordinate. For line charts
//! a leading second axis selects one curve per value; for heatmaps it is
//! the vertical coordinate.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::{ExpError, Result};
use crate::format::format_number;
use crate::sweep::SweepResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartKind {
    Line,
    Heatmap,
}

impl ChartKind {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "line" => Ok(ChartKind::Line),
            "heatmap" => Ok(ChartKind::Heatmap),
            other => Err(ExpError::Config(format!("unknown chart kind '{other}'"))),
        }
    }
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 150.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 50.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

pub fn render(result: &SweepResult, kind: ChartKind) -> Result<String> {
    match result.axes.len() {
        0 => return Err(ExpError::Config("cannot plot a sweep without axes".into())),
        1 | 2 => {}
        n => {
            return Err(ExpError::Config(format!(
                "SVG output supports at most 2 axes, sweep has {n}"
            )))
        }
    }
    match kind {
        ChartKind::Line => Ok(line_chart(result)),
        ChartKind::Heatmap => heatmap(result),
    }
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(xs: &[f64], ys: &[f64]) -> Self {
        let (x0, x1) = padded_range(xs);
        let (y0, y1) = padded_range(ys);
        Frame { x0, x1, y0, y1 }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN_L + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - MARGIN_L - MARGIN_R)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN_B - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - MARGIN_T - MARGIN_B)
    }
}

fn padded_range(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().copied().filter(|x| x.is_finite()).fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().filter(|x| x.is_finite()).fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 * (1.0 + lo.abs()) {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn header(out: &mut String) {
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"11\">"
    )
    .unwrap();
    writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>").unwrap();
}

fn axes_box(out: &mut String, f: &Frame, xlabel: &str, ylabel: &str) {
    let (l, r) = (MARGIN_L, WIDTH - MARGIN_R);
    let (t, b) = (MARGIN_T, HEIGHT - MARGIN_B);
    writeln!(
        out,
        "<rect x=\"{l}\" y=\"{t}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"black\"/>",
        r - l,
        b - t
    )
    .unwrap();
    for k in 0..=4 {
        let fx = f.x0 + (f.x1 - f.x0) * k as f64 / 4.0;
        let fy = f.y0 + (f.y1 - f.y0) * k as f64 / 4.0;
        writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
            f.px(fx),
            b + 15.0,
            tick(fx)
        )
        .unwrap();
        writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>",
            l - 5.0,
            f.py(fy) + 4.0,
            tick(fy)
        )
        .unwrap();
    }
    writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
        (l + r) / 2.0,
        HEIGHT - 12.0,
        escape(xlabel)
    )
    .unwrap();
    writeln!(
        out,
        "<text x=\"15\" y=\"{:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 15 {:.2})\">{}</text>",
        (t + b) / 2.0,
        (t + b) / 2.0,
        escape(ylabel)
    )
    .unwrap();
}

fn tick(v: f64) -> String {
    format_number((v * 1e4).round() / 1e4)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn line_chart(result: &SweepResult) -> String {
    let n_axes = result.axes.len();
    let x_axis = &result.axes[n_axes - 1];
    let nx = x_axis.values.len();
    let series_values: Vec<Option<f64>> = if n_axes == 2 {
        result.axes[0].values.iter().map(|&v| Some(v)).collect()
    } else {
        vec![None]
    };
    let outputs = &result.header[n_axes..];

    let all_y: Vec<f64> = result.rows.iter().flat_map(|r| r[n_axes..].iter().copied()).collect();
    let frame = Frame::new(&x_axis.values, &all_y);

    let mut out = String::new();
    header(&mut out);
    let ylabel = outputs.join(", ");
    axes_box(&mut out, &frame, x_axis.name.as_str(), &ylabel);

    let mut colour = 0;
    let mut legend_y = MARGIN_T + 10.0;
    for (col, name) in outputs.iter().enumerate() {
        for (s, sv) in series_values.iter().enumerate() {
            let rows = &result.rows[s * nx..(s + 1) * nx];
            let points: Vec<String> = rows
                .iter()
                .filter(|r| r[n_axes + col].is_finite())
                .map(|r| format!("{:.2},{:.2}", frame.px(r[n_axes - 1]), frame.py(r[n_axes + col])))
                .collect();
            let stroke = PALETTE[colour % PALETTE.len()];
            colour += 1;
            writeln!(
                out,
                "<polyline class=\"series\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"1.5\" points=\"{}\"/>",
                points.join(" ")
            )
            .unwrap();
            let label = match sv {
                Some(v) => format!("{name} ({} = {})", result.axes[0].name, format_number(*v)),
                None => name.clone(),
            };
            writeln!(
                out,
                "<line x1=\"{:.2}\" y1=\"{legend_y:.2}\" x2=\"{:.2}\" y2=\"{legend_y:.2}\" stroke=\"{stroke}\" stroke-width=\"2\"/>",
                WIDTH - MARGIN_R + 10.0,
                WIDTH - MARGIN_R + 30.0
            )
            .unwrap();
            writeln!(
                out,
                "<text x=\"{:.2}\" y=\"{:.2}\">{}</text>",
                WIDTH - MARGIN_R + 35.0,
                legend_y + 4.0,
                escape(&label)
            )
            .unwrap();
            legend_y += 16.0;
        }
    }
    out.push_str("</svg>\n");
    out
}

fn heatmap(result: &SweepResult) -> Result<String> {
    if result.axes.len() != 2 {
        return Err(ExpError::Config("heatmap needs exactly 2 axes".into()));
    }
    let value_col = 2;
    let name = result
        .header
        .get(value_col)
        .ok_or_else(|| ExpError::Config("heatmap needs an output column".into()))?;
    let (ya, xa) = (&result.axes[0], &result.axes[1]);
    let (nx, ny) = (xa.values.len(), ya.values.len());
    let vals: Vec<f64> = result.rows.iter().map(|r| r[value_col]).collect();
    let (v0, v1) = padded_range(&vals);

    let (l, r) = (MARGIN_L, WIDTH - MARGIN_R);
    let (t, b) = (MARGIN_T, HEIGHT - MARGIN_B);
    let cw = (r - l) / nx as f64;
    let ch = (b - t) / ny as f64;
    let frame = Frame {
        x0: xa.values[0],
        x1: if nx > 1 { xa.values[nx - 1] } else { xa.values[0] + 1.0 },
        y0: ya.values[0],
        y1: if ny > 1 { ya.values[ny - 1] } else { ya.values[0] + 1.0 },
    };

    let mut out = String::new();
    header(&mut out);
    for (k, v) in vals.iter().enumerate() {
        let (iy, ix) = (k / nx, k % nx);
        let fill = if v.is_finite() { colour_map((v - v0) / (v1 - v0)) } else { "#cccccc".into() };
        writeln!(
            out,
            "<rect class=\"cell\" x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{fill}\"/>",
            l + ix as f64 * cw,
            b - (iy + 1) as f64 * ch,
            cw,
            ch
        )
        .unwrap();
    }
    axes_box(&mut out, &frame, xa.name.as_str(), ya.name.as_str());
    for k in 0..=10 {
        let s = k as f64 / 10.0;
        writeln!(
            out,
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"15\" height=\"{:.2}\" fill=\"{}\"/>",
            r + 20.0,
            b - (k + 1) as f64 * (b - t) / 11.0,
            (b - t) / 11.0,
            colour_map(s)
        )
        .unwrap();
    }
    writeln!(out, "<text x=\"{:.2}\" y=\"{:.2}\">{}</text>", r + 40.0, b, tick(v0)).unwrap();
    writeln!(out, "<text x=\"{:.2}\" y=\"{:.2}\">{}</text>", r + 40.0, t + 10.0, tick(v1)).unwrap();
    writeln!(out, "<text x=\"{:.2}\" y=\"{:.2}\">{}</text>", r + 20.0, t - 8.0, escape(name)).unwrap();
    out.push_str("</svg>\n");
    Ok(out)
}

/// Dark blue through teal to yellow.
fn colour_map(s: f64) -> String {
    const STOPS: [(f64, [f64; 3]); 3] = [
        (0.0, [68.0, 1.0, 84.0]),
        (0.5, [33.0, 145.0, 140.0]),
        (1.0, [253.0, 231.0, 37.0]),
    ];
    let s = s.clamp(0.0, 1.0);
    let i = if s <= 0.5 { 0 } else { 1 };
    let (a, ca) = STOPS[i];
    let (b, cb) = STOPS[i + 1];
    let u = (s - a) / (b - a);
    let c: Vec<u8> = (0..3).map(|k| (ca[k] + u * (cb[k] - ca[k])).round() as u8).collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::{Axis, ParamName};

    fn grid(nx: usize, ny: usize) -> SweepResult {
        let ya = Axis::linspace(ParamName::Fss, 1.0, 2.0, ny).unwrap();
        let xa = Axis::linspace(ParamName::Temperature, 0.0, 100.0, nx).unwrap();
        let mut rows = vec![];
        for &y in &ya.values {
            for &x in &xa.values {
                rows.push(vec![y, x, (x / 100.0) * y]);
            }
        }
        SweepResult {
            header: vec!["fss".into(), "temperature".into(), "concurrence".into()],
            axes: vec![ya, xa],
            rows,
        }
    }

    #[test]
    fn heatmap_has_one_cell_per_node() {
        let svg = render(&grid(11, 11), ChartKind::Heatmap).unwrap();
        assert_eq!(svg.matches("<rect class=\"cell\"").count(), 121);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
    }

    #[test]
    fn line_chart_has_one_series_per_leading_value() {
        let svg = render(&grid(7, 3), ChartKind::Line).unwrap();
        assert_eq!(svg.matches("class=\"series\"").count(), 3);
        assert!(svg.contains("fss = 1.5"));
    }

    #[test]
    fn three_axes_refused() {
        let mut r = grid(2, 2);
        r.axes.push(Axis::new(ParamName::Eta, vec![0.5]).unwrap());
        assert!(render(&r, ChartKind::Line).is_err());
        let one = SweepResult {
            header: vec!["w_g".into(), "fidelity".into()],
            axes: vec![Axis::new(ParamName::WG, vec![0.1, 0.2]).unwrap()],
            rows: vec![vec![0.1, 0.7], vec![0.2, 0.6]],
        };
        assert!(render(&one, ChartKind::Heatmap).is_err());
        assert!(render(&one, ChartKind::Line).is_ok());
    }

    #[test]
    fn colour_map_endpoints() {
        assert_eq!(colour_map(0.0), "#440154");
        assert_eq!(colour_map(1.0), "#fde725");
        assert_eq!(colour_map(f64::NAN.max(2.0)), "#fde725");
    }
}
