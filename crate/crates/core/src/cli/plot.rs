//! Minimal standalone SVG line/marker charts.

use std::fmt::Write as _;
use std::path::Path;

use super::csv::{write_new, OutputError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YScale {
    Linear,
    Log,
}

/// One legend entry: simulated points drawn as markers, a closed-form curve
/// drawn as a line. Either may be empty.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Series {
    pub label: String,
    pub markers: Vec<(f64, f64)>,
    pub line: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub y_scale: YScale,
    pub series: Vec<Series>,
}

/// Rendered document plus notes about anything left out.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub svg: String,
    pub notes: Vec<String>,
}

const W: f64 = 760.0;
const H: f64 = 500.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-3..1e4).contains(&a) {
        let s = format!("{v:.6}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.1e}")
    }
}

/// Roughly five round-numbered ticks covering `[lo, hi]`.
fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= 6.0)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        (lo, hi)
    } else {
        let pad = if lo == 0.0 { 0.5 } else { 0.1 * lo.abs() };
        (lo - pad, hi + pad)
    }
}

pub fn render_svg(spec: &PlotSpec) -> Rendered {
    let log = spec.y_scale == YScale::Log;
    let keep = |&(x, y): &(f64, f64)| x.is_finite() && y.is_finite() && (!log || y > 0.0);
    let mut notes = Vec::new();
    let mut drawn: Vec<(usize, Series)> = Vec::new();
    for (i, s) in spec.series.iter().enumerate() {
        let markers: Vec<_> = s.markers.iter().copied().filter(keep).collect();
        let line: Vec<_> = s.line.iter().copied().filter(keep).collect();
        let dropped = s.markers.len() + s.line.len() - markers.len() - line.len();
        if markers.is_empty() && line.is_empty() {
            if !s.markers.is_empty() || !s.line.is_empty() {
                notes.push(format!("series `{}` skipped: no positive finite values to draw", s.label));
            }
            continue;
        }
        if dropped > 0 {
            notes.push(format!("series `{}`: {dropped} zero or non-finite points omitted", s.label));
        }
        drawn.push((
            i,
            Series {
                label: s.label.clone(),
                markers,
                line,
            },
        ));
    }

    let pts = || drawn.iter().flat_map(|(_, s)| s.markers.iter().chain(s.line.iter()));
    let (xlo, xhi) = pts().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
    let ty = |y: f64| if log { y.log10() } else { y };
    let (ylo, yhi) = pts().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(ty(p.1)), b.max(ty(p.1))));
    let (xlo, xhi) = if xlo.is_finite() { padded(xlo, xhi) } else { (0.0, 1.0) };
    let (ylo, yhi) = match (ylo.is_finite(), log) {
        (false, true) => (-6.0, 0.0),
        (false, false) => (0.0, 1.0),
        (true, true) => {
            let (a, b) = (ylo.floor(), yhi.ceil());
            if b > a { (a, b) } else { (a - 1.0, b + 1.0) }
        }
        (true, false) => {
            let (a, b) = padded(ylo.min(0.0), yhi);
            (a, b + 0.05 * (b - a))
        }
    };

    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - xlo) / (xhi - xlo) * pw;
    let sy = |y: f64| TOP + (1.0 - (ty(y) - ylo) / (yhi - ylo)) * ph;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + pw / 2.0,
        escape(&spec.title)
    );

    // grid and tick labels
    for x in nice_ticks(xlo, xhi) {
        let px = sx(x);
        let _ = writeln!(
            svg,
            r##"<line x1="{px:.2}" y1="{TOP}" x2="{px:.2}" y2="{:.2}" stroke="#ddd"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
            TOP + ph,
            TOP + ph + 16.0,
            tick_label(x)
        );
    }
    if log {
        for k in (ylo as i64)..=(yhi as i64) {
            let py = sy(10f64.powi(k as i32));
            let _ = writeln!(
                svg,
                r##"<line x1="{LEFT}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">1e{k}</text>"##,
                LEFT + pw,
                LEFT - 6.0,
                py + 4.0
            );
        }
    } else {
        for y in nice_ticks(ylo, yhi) {
            let py = sy(y);
            let _ = writeln!(
                svg,
                r##"<line x1="{LEFT}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
                LEFT + pw,
                LEFT - 6.0,
                py + 4.0,
                tick_label(y)
            );
        }
    }
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        H - 18.0,
        escape(&spec.x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{0:.2}" text-anchor="middle" transform="rotate(-90 20 {0:.2})">{1}</text>"#,
        TOP + ph / 2.0,
        escape(&spec.y_label)
    );

    for (slot, (i, s)) in drawn.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        if s.line.len() > 1 {
            let path: Vec<String> = s.line.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                path.join(" ")
            );
        }
        for &(x, y) in s.markers.iter().chain(if s.line.len() == 1 { s.line.iter() } else { [].iter() }) {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                sx(x),
                sy(y)
            );
        }
        let ly = TOP + 10.0 + slot as f64 * 20.0;
        let lx = LEFT + pw + 14.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="1.5"/><circle cx="{}" cy="{ly}" r="3.5" fill="none" stroke="{color}" stroke-width="1.5"/><text x="{}" y="{}">{}</text>"#,
            lx + 28.0,
            lx + 14.0,
            lx + 34.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    if drawn.is_empty() {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">no drawable data</text>"#,
            LEFT + pw / 2.0,
            TOP + ph / 2.0
        );
    }
    svg.push_str("</svg>\n");
    Rendered { svg, notes }
}

/// Renders and writes `spec`; returns the notes about skipped data.
pub fn emit_plot(spec: &PlotSpec, path: &Path, overwrite: bool) -> Result<Vec<String>, OutputError> {
    if spec.series.iter().all(|s| s.markers.is_empty() && s.line.is_empty()) {
        return Err(OutputError::Empty(path.to_path_buf()));
    }
    let r = render_svg(spec);
    write_new(path, &r.svg, overwrite)?;
    Ok(r.notes)
}
