//! Minimal line plots written as SVG path elements.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 56.0;
const MAX_POINTS: usize = 1000;

/// How the vertical axis is scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YScale {
    Linear,
    /// `sign(y) log10(1 + |y|)`, for values spanning many decades.
    SymLog,
}

fn transform(y: f64, scale: YScale) -> f64 {
    match scale {
        YScale::Linear => y,
        YScale::SymLog => y.signum() * y.abs().ln_1p() / std::f64::consts::LN_10,
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders `(x, y)` points as a single polyline with a frame and axis labels.
/// Non-finite points are skipped; at most 1000 points are drawn.
pub fn line_plot(title: &str, x_label: &str, y_label: &str, points: &[(f64, f64)], scale: YScale) -> String {
    let stride = points.len().div_ceil(MAX_POINTS).max(1);
    let pts: Vec<(f64, f64)> = points
        .iter()
        .step_by(stride)
        .map(|&(x, y)| (x, transform(y, scale)))
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !(x1 > x0) {
        x1 = x0 + 1.0;
    }
    if !(y1 > y0) {
        y0 -= 0.5;
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#);
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    let _ = writeln!(out, r#"<text x="{}" y="24" font-size="14" text-anchor="middle">{}</text>"#, WIDTH / 2.0, escape(title));
    let _ = writeln!(out, r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">{}</text>"#, WIDTH / 2.0, HEIGHT - 16.0, escape(x_label));
    let y_text = match scale {
        YScale::Linear => escape(y_label),
        YScale::SymLog => format!("symlog10 {}", escape(y_label)),
    };
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" font-size="12" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        y_text
    );
    for (v, anchor, x, y) in [
        (x0, "start", MARGIN, HEIGHT - MARGIN + 14.0),
        (x1, "end", WIDTH - MARGIN, HEIGHT - MARGIN + 14.0),
    ] {
        let _ = writeln!(out, r#"<text x="{x}" y="{y}" font-size="10" text-anchor="{anchor}">{v:.4e}</text>"#);
    }
    for (v, y) in [(y0, HEIGHT - MARGIN), (y1, MARGIN + 10.0)] {
        let _ = writeln!(out, r#"<text x="{}" y="{y}" font-size="10" text-anchor="end">{v:.4e}</text>"#, MARGIN - 4.0);
    }
    if !pts.is_empty() {
        let mut d = String::new();
        for (i, &(x, y)) in pts.iter().enumerate() {
            let _ = write!(d, "{}{:.3},{:.3}", if i == 0 { "M" } else { " L" }, sx(x), sy(y));
        }
        let _ = writeln!(out, r#"<path d="{d}" fill="none" stroke="steelblue" stroke-width="1.5"/>"#);
    }
    out.push_str("</svg>\n");
    out
}
