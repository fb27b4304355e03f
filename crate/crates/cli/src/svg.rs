//! Static SVG charts: the Visual TSFD plane and index-versus-K elbow plots.
//!
//! Output is plain SVG 1.1 text with no timestamps, so identical inputs give
//! byte-identical files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use vtsfd_core::selection::{elbow, Orientation};
use vtsfd_core::InertiaTriple;

use crate::error::{HarnessError, Result};

const WIDTH: f64 = 560.0;
const HEIGHT: f64 = 540.0;
const LEFT: f64 = 90.0;
const TOP: f64 = 50.0;
/// Side of the square plotting area; equal axis scales keep the diagonal at 45 degrees.
const PLOT: f64 = 420.0;

const DIAGONAL_COLOR: &str = "#d62728";
const CURVE_COLOR: &str = "#1f77b4";
const HIGHLIGHT_COLOR: &str = "#ff7f0e";

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

/// Round tick values covering `[lo, hi]`: about five steps of 1, 2 or 5
/// times a power of ten. Returns the ticks and the step.
fn nice_ticks(lo: f64, hi: f64) -> (Vec<f64>, f64) {
    let span = if hi > lo { hi - lo } else { lo.abs().max(1.0) };
    let raw = span / 5.0;
    let magnitude = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|f| f * magnitude)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * magnitude);
    let first = (lo / step).floor() as i64;
    let last = (hi / step).ceil().max(first as f64 + 1.0) as i64;
    ((first..=last).map(|i| i as f64 * step).collect(), step)
}

fn tick_label(v: f64, step: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if v.abs() >= 1e6 || v.abs() < 1e-3 {
        return format!("{v:.1e}");
    }
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    format!("{v:.decimals$}")
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="28" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + PLOT / 2.0,
        escape(title)
    );
}

/// Frame, ticks and axis titles for a plot area mapping `[x0, x1] x [y0, y1]`.
fn axes(out: &mut String, x_ticks: &[(f64, String)], y_ticks: &[(f64, String)], x_title: &str, y_title: &str) {
    let bottom = TOP + PLOT;
    let _ = writeln!(
        out,
        r#"<g class="axes" stroke="black" stroke-width="1"><line x1="{LEFT}" y1="{bottom}" x2="{:.2}" y2="{bottom}"/><line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{bottom}"/></g>"#,
        LEFT + PLOT
    );
    for (px, label) in x_ticks {
        let _ = writeln!(
            out,
            r#"<line class="tick" x1="{px:.2}" y1="{bottom}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            bottom + 5.0,
            bottom + 20.0,
            escape(label)
        );
    }
    for (py, label) in y_ticks {
        let _ = writeln!(
            out,
            r#"<line class="tick" x1="{:.2}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            py + 4.0,
            escape(label)
        );
    }
    let _ = writeln!(
        out,
        r#"<text class="axis-label" x="{:.2}" y="{:.2}" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + PLOT / 2.0,
        bottom + 42.0,
        escape(x_title)
    );
    let _ = writeln!(
        out,
        r#"<text class="axis-label" x="24" y="{:.2}" text-anchor="middle" font-size="14" transform="rotate(-90 24 {:.2})">{}</text>"#,
        TOP + PLOT / 2.0,
        TOP + PLOT / 2.0,
        escape(y_title)
    );
}

/// Visual TSFD chart: `FB` against `FI` per `K`, the `FB = FI` diagonal, a
/// dashed ray from the origin to every point and the curve through the
/// points in increasing `K`.
pub fn visual_tsfd_svg(points: &BTreeMap<usize, InertiaTriple>, title: &str) -> String {
    let top_value = points
        .values()
        .map(|t| t.fi.max(t.fb))
        .fold(0.0, f64::max);
    let (ticks, step) = nice_ticks(0.0, if top_value > 0.0 { top_value } else { 1.0 });
    let span = *ticks.last().expect("at least two ticks");
    let sx = |v: f64| LEFT + v / span * PLOT;
    let sy = |v: f64| TOP + PLOT - v / span * PLOT;

    let mut out = String::new();
    header(&mut out, title);
    let x_ticks: Vec<(f64, String)> = ticks.iter().map(|v| (sx(*v), tick_label(*v, step))).collect();
    let y_ticks: Vec<(f64, String)> = ticks.iter().map(|v| (sy(*v), tick_label(*v, step))).collect();
    axes(&mut out, &x_ticks, &y_ticks, "FI", "FB");

    let _ = writeln!(
        out,
        r#"<line class="diagonal" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{DIAGONAL_COLOR}" stroke-width="2"/>"#,
        sx(0.0),
        sy(0.0),
        sx(span),
        sy(span)
    );
    for (k, t) in points {
        let _ = writeln!(
            out,
            r#"<line class="ray" data-k="{k}" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{DIAGONAL_COLOR}" stroke-width="1" stroke-dasharray="6,4"/>"#,
            sx(0.0),
            sy(0.0),
            sx(t.fi),
            sy(t.fb)
        );
    }
    let path: Vec<String> = points
        .values()
        .map(|t| format!("{:.2},{:.2}", sx(t.fi), sy(t.fb)))
        .collect();
    let _ = writeln!(
        out,
        r#"<polyline class="tsfd-curve" points="{}" fill="none" stroke="{CURVE_COLOR}" stroke-width="2"/>"#,
        path.join(" ")
    );
    for (k, t) in points {
        let (x, y) = (sx(t.fi), sy(t.fb));
        let _ = writeln!(
            out,
            r#"<circle class="point" data-k="{k}" cx="{x:.2}" cy="{y:.2}" r="3.5" fill="{CURVE_COLOR}"/><text class="k-label" x="{:.2}" y="{:.2}">K={k}</text>"#,
            x + 5.0,
            y - 5.0
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Line chart of an index against `K`; the elbow `K` is highlighted when the
/// series has at least three consecutive values.
pub fn elbow_svg(series: &BTreeMap<usize, f64>, index_name: &str, orientation: Orientation, title: &str) -> String {
    let finite: Vec<(usize, f64)> = series
        .iter()
        .filter(|(_, v)| v.is_finite())
        .map(|(k, v)| (*k, *v))
        .collect();
    let k_lo = finite.first().map(|p| p.0).unwrap_or(2) as f64;
    let k_hi = finite.last().map(|p| p.0).unwrap_or(3) as f64;
    let (mut y_lo, mut y_hi) = finite
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, v)| (lo.min(*v), hi.max(*v)));
    if !y_lo.is_finite() {
        (y_lo, y_hi) = (0.0, 1.0);
    }
    let (y_ticks_raw, y_step) = nice_ticks(y_lo, y_hi);
    let (y_lo, y_hi) = (y_ticks_raw[0], *y_ticks_raw.last().expect("at least two ticks"));
    let x_span = if k_hi > k_lo { k_hi - k_lo } else { 1.0 };
    let sx = |k: f64| LEFT + 20.0 + (k - k_lo) / x_span * (PLOT - 40.0);
    let sy = |v: f64| TOP + PLOT - (v - y_lo) / (y_hi - y_lo) * PLOT;

    let mut out = String::new();
    header(&mut out, title);
    let x_ticks: Vec<(f64, String)> = finite.iter().map(|(k, _)| (sx(*k as f64), k.to_string())).collect();
    let y_ticks: Vec<(f64, String)> = y_ticks_raw.iter().map(|v| (sy(*v), tick_label(*v, y_step))).collect();
    axes(&mut out, &x_ticks, &y_ticks, "K", index_name);

    let path: Vec<String> = finite
        .iter()
        .map(|(k, v)| format!("{:.2},{:.2}", sx(*k as f64), sy(*v)))
        .collect();
    let _ = writeln!(
        out,
        r#"<polyline class="index-curve" points="{}" fill="none" stroke="{CURVE_COLOR}" stroke-width="2"/>"#,
        path.join(" ")
    );
    for (k, v) in &finite {
        let _ = writeln!(
            out,
            r#"<circle class="point" data-k="{k}" cx="{:.2}" cy="{:.2}" r="3.5" fill="{CURVE_COLOR}"/>"#,
            sx(*k as f64),
            sy(*v)
        );
    }
    if let Ok(k) = elbow(series, orientation) {
        let v = series[&k];
        let (x, y) = (sx(k as f64), sy(v));
        let _ = writeln!(
            out,
            r#"<circle class="elbow" data-k="{k}" cx="{x:.2}" cy="{y:.2}" r="7" fill="none" stroke="{HIGHLIGHT_COLOR}" stroke-width="2.5"/><text class="elbow-label" x="{:.2}" y="{:.2}" fill="{HIGHLIGHT_COLOR}">elbow K={k}</text>"#,
            x + 9.0,
            y + 16.0
        );
    }
    out.push_str("</svg>\n");
    out
}

pub fn write_svg(path: &Path, svg: &str) -> Result<()> {
    fs::write(path, svg).map_err(|e| HarnessError::io(path, e))
}

/// Writes the Visual TSFD chart for a sweep.
pub fn emit_visual_tsfd_svg(points: &BTreeMap<usize, InertiaTriple>, title: &str, path: &Path) -> Result<()> {
    write_svg(path, &visual_tsfd_svg(points, title))
}

/// Writes the elbow chart for an index series.
pub fn emit_elbow_svg(
    series: &BTreeMap<usize, f64>,
    index_name: &str,
    orientation: Orientation,
    title: &str,
    path: &Path,
) -> Result<()> {
    write_svg(path, &elbow_svg(series, index_name, orientation, title))
}
