//! Artifact emission: byte-stable CSV writers, a static-sample CSV reader,
//! and self-contained SVG line plots.
//!
//! Every float in a CSV is printed with [`format_number`], which always
//! yields nine significant digits in scientific notation. The format is a
//! pure function of the value, so re-running a deterministic computation
//! reproduces its CSV byte for byte — convenient for diffing runs and for
//! regression-testing the pipeline itself.
//!
//! The SVG writer draws straightforward line plots (axes, gridlines, tick
//! labels, legend) with no external assets or scripts, so the files render
//! anywhere and stay diffable: the drawing is a pure function of the data.

use crate::dynamics::TimeSeries;
use crate::linear::RootLocus;
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("bad CSV in {path} at line {line}: {message}")]
    Csv {
        path: String,
        line: usize,
        message: String,
    },
}

/// Nine significant digits, scientific notation. The same value always
/// produces the same bytes.
pub fn format_number(value: f64) -> String {
    format!("{value:.8e}")
}

/// Render a simulated time series as CSV.
///
/// Columns are `t,s_m,phi_rad,sdot,phidot,P_pa,gamma_rad,r_m`, plus a
/// trailing `phi_d_rad` column when the series carries a reference
/// trajectory (closed-loop runs). The header is always present, so an empty
/// series yields exactly one line.
pub fn time_series_csv(series: &TimeSeries) -> String {
    let mut out = String::from("t,s_m,phi_rad,sdot,phidot,P_pa,gamma_rad,r_m");
    if series.phi_d_rad.is_some() {
        out.push_str(",phi_d_rad");
    }
    out.push('\n');
    for i in 0..series.len() {
        let cols = [
            series.t[i],
            series.s_m[i],
            series.phi_rad[i],
            series.s_dot[i],
            series.phi_dot[i],
            series.p_pa[i],
            series.gamma_rad[i],
            series.r_m[i],
        ];
        let mut first = true;
        for value in cols {
            if !first {
                out.push(',');
            }
            out.push_str(&format_number(value));
            first = false;
        }
        if let Some(phi_d) = &series.phi_d_rad {
            out.push(',');
            out.push_str(&format_number(phi_d[i]));
        }
        out.push('\n');
    }
    out
}

/// Render a root locus as CSV with columns `K,branch,re,im` — one row per
/// (gain, branch) pair, grouped by gain.
pub fn locus_csv(locus: &RootLocus) -> String {
    let mut out = String::from("K,branch,re,im\n");
    for (i, k) in locus.gains.iter().enumerate() {
        for (b, branch) in locus.branches.iter().enumerate() {
            let pole = branch[i];
            let _ = writeln!(
                out,
                "{},{b},{},{}",
                format_number(*k),
                format_number(pole.re),
                format_number(pole.im)
            );
        }
    }
    out
}

/// One static measurement: applied pressure and loads, measured deflection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaticSample {
    pub p_pa: f64,
    pub s_m: f64,
    pub phi_rad: f64,
    pub f_n: f64,
    pub m_nm: f64,
}

/// Read static samples from a CSV with header `P_pa,s_m,phi_rad,F_N,M_Nm`.
pub fn read_static_samples(path: &Path) -> Result<Vec<StaticSample>, OutputError> {
    let text = std::fs::read_to_string(path).map_err(|source| OutputError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let csv_err = |line: usize, message: String| OutputError::Csv {
        path: path.display().to_string(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| csv_err(1, "empty file".into()))?;
    const EXPECTED: &str = "P_pa,s_m,phi_rad,F_N,M_Nm";
    if header.trim() != EXPECTED {
        return Err(csv_err(
            1,
            format!("expected header '{EXPECTED}', got '{}'", header.trim()),
        ));
    }
    let mut samples = Vec::new();
    for (idx, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 5 {
            return Err(csv_err(
                idx + 1,
                format!("expected 5 fields, got {}", fields.len()),
            ));
        }
        let mut values = [0.0f64; 5];
        for (j, field) in fields.iter().enumerate() {
            values[j] = field
                .parse()
                .map_err(|e| csv_err(idx + 1, format!("field {}: {e}", j + 1)))?;
        }
        samples.push(StaticSample {
            p_pa: values[0],
            s_m: values[1],
            phi_rad: values[2],
            f_n: values[3],
            m_nm: values[4],
        });
    }
    Ok(samples)
}

/// Write text to a file, mapping failures to [`OutputError::Io`].
pub fn write_text(path: &Path, text: &str) -> Result<(), OutputError> {
    std::fs::write(path, text).map_err(|source| OutputError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Titles and axis labels for a line plot.
#[derive(Debug, Clone)]
pub struct PlotSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
}

impl PlotSpec {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Self {
            title: title.to_string(),
            x_label: x_label.to_string(),
            y_label: y_label.to_string(),
        }
    }
}

/// One labeled polyline.
#[derive(Debug, Clone)]
pub struct Curve {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Curve {
    pub fn new(label: &str, points: Vec<(f64, f64)>) -> Self {
        Self {
            label: label.to_string(),
            points,
        }
    }
}

const SVG_WIDTH: f64 = 800.0;
const SVG_HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 78.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 46.0;
const MARGIN_BOTTOM: f64 = 58.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

fn escape_xml(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Tick label: fixed notation in a friendly magnitude window, scientific
/// outside it, trailing zeros trimmed. Deterministic for a given value.
fn format_tick(value: f64) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    let magnitude = value.abs();
    if (1e-3..1e5).contains(&magnitude) {
        let text = format!("{value:.4}");
        let trimmed = text.trim_end_matches('0').trim_end_matches('.');
        trimmed.to_string()
    } else {
        format!("{value:.2e}")
    }
}

/// Round tick positions covering `[lo, hi]` with a 1/2/2.5/5 step ladder.
fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let (mut lo, mut hi) = (lo, hi);
    if !lo.is_finite() || !hi.is_finite() {
        return vec![0.0, 1.0];
    }
    if lo == hi {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        lo -= pad;
        hi += pad;
    }
    let span = hi - lo;
    let raw_step = span / 5.0;
    let magnitude = 10f64.powf(raw_step.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * magnitude)
        .find(|s| *s >= raw_step)
        .unwrap_or(10.0 * magnitude);
    let start = (lo / step).floor() * step;
    let mut ticks = Vec::new();
    let mut k = 0;
    loop {
        let t = start + step * k as f64;
        ticks.push(t);
        if t >= hi || k > 12 {
            break;
        }
        k += 1;
    }
    ticks
}

/// Render labeled curves as a self-contained SVG line plot.
pub fn line_plot_svg(spec: &PlotSpec, curves: &[Curve]) -> String {
    let finite: Vec<(f64, f64)> = curves
        .iter()
        .flat_map(|c| c.points.iter().copied())
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    let (x_lo, x_hi, y_lo, y_hi) = if finite.is_empty() {
        (0.0, 1.0, 0.0, 1.0)
    } else {
        let x_lo = finite.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        let x_hi = finite.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        let y_lo = finite.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        let y_hi = finite.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        (x_lo, x_hi, y_lo, y_hi)
    };
    let x_ticks = nice_ticks(x_lo, x_hi);
    let y_ticks = nice_ticks(y_lo, y_hi);
    let (x_min, x_max) = (x_ticks[0], *x_ticks.last().unwrap());
    let (y_min, y_max) = (y_ticks[0], *y_ticks.last().unwrap());

    let plot_w = SVG_WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = SVG_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let to_px = |x: f64, y: f64| -> (f64, f64) {
        let px = MARGIN_LEFT + (x - x_min) / (x_max - x_min) * plot_w;
        let py = MARGIN_TOP + (y_max - y) / (y_max - y_min) * plot_h;
        (px, py)
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_WIDTH}\" height=\"{SVG_HEIGHT}\" viewBox=\"0 0 {SVG_WIDTH} {SVG_HEIGHT}\" font-family=\"sans-serif\">"
    );
    let _ = writeln!(
        svg,
        "  <rect width=\"{SVG_WIDTH}\" height=\"{SVG_HEIGHT}\" fill=\"white\"/>"
    );

    // Gridlines and tick labels.
    for &tx in &x_ticks {
        let (px, _) = to_px(tx, y_min);
        let _ = writeln!(
            svg,
            "  <line x1=\"{px:.2}\" y1=\"{:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"#dddddd\" stroke-width=\"1\"/>",
            MARGIN_TOP,
            MARGIN_TOP + plot_h
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{px:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\">{}</text>",
            MARGIN_TOP + plot_h + 18.0,
            escape_xml(&format_tick(tx))
        );
    }
    for &ty in &y_ticks {
        let (_, py) = to_px(x_min, ty);
        let _ = writeln!(
            svg,
            "  <line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{:.2}\" y2=\"{py:.2}\" stroke=\"#dddddd\" stroke-width=\"1\"/>",
            MARGIN_LEFT,
            MARGIN_LEFT + plot_w
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"end\">{}</text>",
            MARGIN_LEFT - 8.0,
            py + 4.0,
            escape_xml(&format_tick(ty))
        );
    }

    // Plot border.
    let _ = writeln!(
        svg,
        "  <rect x=\"{MARGIN_LEFT}\" y=\"{MARGIN_TOP}\" width=\"{plot_w}\" height=\"{plot_h}\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>"
    );

    // Curves: split polylines at non-finite points.
    for (ci, curve) in curves.iter().enumerate() {
        let color = PALETTE[ci % PALETTE.len()];
        let mut run: Vec<(f64, f64)> = Vec::new();
        let flush = |run: &mut Vec<(f64, f64)>, svg: &mut String| {
            if run.len() >= 2 {
                let coords: Vec<String> =
                    run.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                let _ = writeln!(
                    svg,
                    "  <polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
                    coords.join(" ")
                );
            }
            run.clear();
        };
        for &(x, y) in &curve.points {
            if x.is_finite() && y.is_finite() {
                run.push(to_px(x, y));
            } else {
                flush(&mut run, &mut svg);
            }
        }
        flush(&mut run, &mut svg);
    }

    // Legend, top-right inside the plot area.
    for (ci, curve) in curves.iter().enumerate() {
        let color = PALETTE[ci % PALETTE.len()];
        let ly = MARGIN_TOP + 16.0 + 18.0 * ci as f64;
        let lx = MARGIN_LEFT + plot_w - 150.0;
        let _ = writeln!(
            svg,
            "  <line x1=\"{lx:.2}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" stroke=\"{color}\" stroke-width=\"2\"/>",
            lx + 24.0
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\">{}</text>",
            lx + 30.0,
            ly + 4.0,
            escape_xml(&curve.label)
        );
    }

    // Title and axis labels.
    let _ = writeln!(
        svg,
        "  <text x=\"{:.2}\" y=\"24\" font-size=\"16\" text-anchor=\"middle\">{}</text>",
        SVG_WIDTH / 2.0,
        escape_xml(&spec.title)
    );
    let _ = writeln!(
        svg,
        "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\">{}</text>",
        MARGIN_LEFT + plot_w / 2.0,
        SVG_HEIGHT - 12.0,
        escape_xml(&spec.x_label)
    );
    let _ = writeln!(
        svg,
        "  <text x=\"20\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 20 {:.2})\">{}</text>",
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0,
        escape_xml(&spec.y_label)
    );
    svg.push_str("</svg>\n");
    svg
}
