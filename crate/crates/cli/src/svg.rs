//! A standalone SVG 1.1 line plot of Φ(p).

use std::fmt::Write;

use cesaro_core::phi::PhiPoint;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 70.0;

/// Tick positions at a 1, 2 or 5 times power-of-ten spacing, about `target` of them.
fn ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let raw = (hi - lo) / target as f64;
    let magnitude = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * magnitude)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * magnitude);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn label(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// Renders `points`, which must be sorted by `p` and hold at least two entries.
pub fn render_curve(points: &[PhiPoint]) -> String {
    let (p_lo, p_hi) = (points[0].p, points[points.len() - 1].p);
    let (mut y_lo, mut y_hi) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), pt| {
            (lo.min(pt.phi), hi.max(pt.phi))
        });
    let pad = 0.05 * (y_hi - y_lo).max(1e-12);
    y_lo -= pad;
    y_hi += pad;

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |p: f64| LEFT + (p - p_lo) / (p_hi - p_lo) * plot_w;
    let sy = |v: f64| TOP + (y_hi - v) / (y_hi - y_lo) * plot_h;

    let mut svg = String::new();
    // Writing to a String cannot fail.
    let _ = writeln!(
        svg,
        r#"<?xml version="1.0" encoding="UTF-8" standalone="yes"?>"#
    );
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="800" height="600" viewBox="0 0 800 600">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="800" height="600" fill="white"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="30" font-family="sans-serif" font-size="18" text-anchor="middle">Phi(p) for {} &lt;= p &lt;= {}</text>"#,
        LEFT + plot_w / 2.0,
        label(p_lo),
        label(p_hi)
    );

    let _ = writeln!(
        svg,
        r#"<g font-family="sans-serif" font-size="12" stroke="black" stroke-width="1">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT:.1}" y="{TOP:.1}" width="{plot_w:.1}" height="{plot_h:.1}" fill="none"/>"#
    );
    for p in ticks(p_lo, p_hi, 10) {
        let x = sx(p);
        let y = TOP + plot_h;
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{y:.2}" x2="{x:.2}" y2="{:.2}"/>"#,
            y + 6.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{:.2}" stroke="none" text-anchor="middle">{}</text>"#,
            y + 22.0,
            label(p)
        );
    }
    for v in ticks(y_lo, y_hi, 8) {
        let y = sy(v);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT:.2}" y2="{y:.2}"/>"#,
            LEFT - 6.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" stroke="none" text-anchor="end">{}</text>"#,
            LEFT - 10.0,
            y + 4.0,
            label(v)
        );
    }
    let _ = writeln!(svg, "</g>");

    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="16" text-anchor="middle">p</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 20.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="25" y="{:.1}" font-family="sans-serif" font-size="16" text-anchor="middle" transform="rotate(-90 25 {:.1})">Phi(p)</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    if (y_lo..=y_hi).contains(&1.0) {
        let y = sy(1.0);
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#888888" stroke-dasharray="6 4"/>"##,
            LEFT + plot_w
        );
    }

    let path: Vec<String> = points
        .iter()
        .map(|pt| format!("{:.2},{:.2}", sx(pt.p), sy(pt.phi)))
        .collect();
    let _ = writeln!(
        svg,
        r##"<polyline fill="none" stroke="#1f4e9c" stroke-width="2" points="{}"/>"##,
        path.join(" ")
    );
    let _ = writeln!(svg, "</svg>");
    svg
}
