// Copyright 2026 qbo Contributors
// SPDX-License-Identifier: Apache-2.0

//! Minimal self-contained SVG line plots. The first column is the abscissa;
//! every other column is a curve. Exact-quantum curves are solid, classical
//! curves dashed and free-particle curves dotted; a kurtosis plot gets a
//! reference line at the Gaussian value 3.

use std::fmt::Write as _;
use std::path::Path;

use qbo_core::experiments::Dataset;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axes {
    LogLog,
    Linear,
}

impl Axes {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "loglog" => Some(Axes::LogLog),
            "linear" => Some(Axes::Linear),
            _ => None,
        }
    }
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f4e9c", "#c0392b", "#2e8b57", "#8e44ad", "#d35400", "#555555"];
const KAPPA_GAUSSIAN: f64 = 3.0;

fn dash_for(column: &str) -> Option<&'static str> {
    if column.contains("classical") {
        Some("8 5")
    } else if column.contains("free") {
        Some("2 4")
    } else {
        None
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Axis mapping in transformed (possibly log10) coordinates.
struct Scale {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Scale {
    fn fit(values: impl Iterator<Item = f64>, log: bool, extra: Option<f64>) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.chain(extra) {
            let t = if log { v.log10() } else { v };
            lo = lo.min(t);
            hi = hi.max(t);
        }
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo <= f64::EPSILON * lo.abs().max(1.0) {
            let pad = if log { 0.5 } else { 0.5 * lo.abs().max(1.0) };
            (lo, hi) = (lo - pad, hi + pad);
        } else if !log {
            let pad = 0.05 * (hi - lo);
            (lo, hi) = (lo - pad, hi + pad);
        }
        Self { lo, hi, log }
    }

    fn frac(&self, v: f64) -> f64 {
        let t = if self.log { v.log10() } else { v };
        (t - self.lo) / (self.hi - self.lo)
    }

    /// Tick positions (in data units) and their labels.
    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            let (a, b) = (self.lo.ceil() as i64, self.hi.floor() as i64);
            let step = ((b - a) / 8).max(1);
            (a..=b)
                .step_by(step as usize)
                .map(|e| (10f64.powi(e as i32), format!("1e{e}")))
                .collect()
        } else {
            let raw = (self.hi - self.lo) / 6.0;
            let mag = 10f64.powf(raw.log10().floor());
            let step = [1.0, 2.0, 5.0, 10.0]
                .into_iter()
                .map(|m| m * mag)
                .find(|s| *s >= raw)
                .unwrap_or(10.0 * mag);
            let first = (self.lo / step).ceil() as i64;
            let last = (self.hi / step).floor() as i64;
            (first..=last)
                .map(|k| {
                    let v = k as f64 * step;
                    (v, format!("{}", (v / step).round() * step))
                })
                .collect()
        }
    }
}

fn usable(v: f64, log: bool) -> bool {
    v.is_finite() && (!log || v > 0.0)
}

/// Datasets that carry a kurtosis column are plotted as kurtosis only:
/// the auxiliary moments live on incomparable scales.
fn kurtosis_view(ds: &Dataset) -> Option<Dataset> {
    let keep: Vec<usize> = (1..ds.columns.len()).filter(|&i| ds.columns[i].starts_with("kappa")).collect();
    if keep.is_empty() || keep.len() + 1 == ds.columns.len() {
        return None;
    }
    let mut view = ds.clone();
    view.columns = std::iter::once(0).chain(keep.iter().copied()).map(|i| ds.columns[i].clone()).collect();
    view.rows = ds
        .rows
        .iter()
        .map(|r| std::iter::once(0).chain(keep.iter().copied()).map(|i| r[i]).collect())
        .collect();
    Some(view)
}

/// Renders `ds` as an SVG document.
pub fn render_svg(ds: &Dataset, axes: Axes) -> CliResult<String> {
    let view = kurtosis_view(ds);
    let ds = view.as_ref().unwrap_or(ds);
    if ds.columns.len() < 2 {
        return Err(CliError::usage("a plot needs at least two columns"));
    }
    let log = axes == Axes::LogLog;
    let kappa = ds.columns[1..].iter().all(|c| c.starts_with("kappa"));
    let xs = ds.rows.iter().map(|r| r[0]).filter(|v| usable(*v, log));
    let ys = ds
        .rows
        .iter()
        .flat_map(|r| r[1..].iter().copied())
        .filter(|v| usable(*v, log));
    let sx = Scale::fit(xs, log, None);
    let sy = Scale::fit(ys, log, (kappa && !log).then_some(KAPPA_GAUSSIAN));
    let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let px = |v: f64| LEFT + sx.frac(v) * pw;
    let py = |v: f64| TOP + (1.0 - sy.frac(v)) * ph;

    let mut s = String::new();
    let w = &mut s;
    // Writing to a String cannot fail.
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(w, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        w,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + pw / 2.0,
        escape(&ds.name)
    );
    let _ = writeln!(
        w,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for (v, label) in sx.ticks() {
        let x = px(v);
        let _ = writeln!(
            w,
            r#"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="black"/><text x="{x:.2}" y="{}" text-anchor="middle">{label}</text>"#,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 19.0
        );
    }
    for (v, label) in sy.ticks() {
        let y = py(v);
        let _ = writeln!(
            w,
            r#"<line x1="{}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{label}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        w,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 15.0,
        escape(&ds.columns[0])
    );
    let ylabel = if kappa { "kurtosis" } else { "value" };
    let _ = writeln!(
        w,
        r#"<text x="20" y="{}" text-anchor="middle" transform="rotate(-90 20 {})">{ylabel}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );
    if kappa && !log {
        let y = py(KAPPA_GAUSSIAN);
        let _ = writeln!(
            w,
            r##"<line class="reference" x1="{LEFT}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#999999" stroke-dasharray="3 3"/>"##,
            LEFT + pw
        );
    }
    for (k, name) in ds.columns.iter().enumerate().skip(1) {
        let color = COLORS[(k - 1) % COLORS.len()];
        let points: Vec<(f64, f64)> = ds
            .rows
            .iter()
            .filter(|r| usable(r[0], log) && usable(r[k], log))
            .map(|r| (px(r[0]), py(r[k])))
            .collect();
        if ds.rows.len() == 1 {
            for (x, y) in &points {
                let _ = writeln!(w, r#"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="{color}"/>"#);
            }
        } else if !points.is_empty() {
            let coords: Vec<String> = points.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let dash = dash_for(name)
                .map(|d| format!(r#" stroke-dasharray="{d}""#))
                .unwrap_or_default();
            let _ = writeln!(
                w,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.6"{dash} points="{}"/>"#,
                coords.join(" ")
            );
        }
        let ly = TOP + 10.0 + 18.0 * (k - 1) as f64;
        let lx = LEFT + pw + 12.0;
        let dash = dash_for(name)
            .map(|d| format!(r#" stroke-dasharray="{d}""#))
            .unwrap_or_default();
        let _ = writeln!(
            w,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="1.6"{dash}/><text x="{}" y="{}">{}</text>"#,
            lx + 24.0,
            lx + 30.0,
            ly + 4.0,
            escape(name)
        );
    }
    let _ = writeln!(w, "</svg>");
    Ok(s)
}

/// Writes the plot of `ds` to `path`.
pub fn emit_plot(ds: &Dataset, path: &Path, axes: Axes) -> CliResult<()> {
    let svg = render_svg(ds, axes)?;
    std::fs::write(path, svg).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}
