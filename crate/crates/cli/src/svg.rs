//! A minimal SVG writer for log-scale error plots: relative error against
//! M, one polyline per (method, setting) series.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::record::SweepRecord;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const MARGIN: f64 = 60.0;
/// Errors below this (including exact zeros) are drawn at the floor.
const LOG_FLOOR: f64 = -17.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#7f7f7f",
];

fn series_label(r: &SweepRecord) -> String {
    format!("{} {}", r.method, r.order_or_tol)
}

/// SVG text of the plot; breakdown rows are skipped.
pub fn error_plot(records: &[SweepRecord]) -> String {
    // Keyed by first appearance so colours follow row order.
    let mut order: Vec<String> = Vec::new();
    let mut series: BTreeMap<usize, Vec<(f64, f64)>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.rel_error.is_finite()) {
        let label = series_label(r);
        let idx = order.iter().position(|l| *l == label).unwrap_or_else(|| {
            order.push(label);
            order.len() - 1
        });
        let y = if r.rel_error > 0.0 {
            r.rel_error.log10().max(LOG_FLOOR)
        } else {
            LOG_FLOOR
        };
        series.entry(idx).or_default().push((r.m, y));
    }

    let points = series.values().flatten();
    let (mut x0, mut x1, mut y0, mut y1) =
        (f64::INFINITY, f64::NEG_INFINITY, LOG_FLOOR, LOG_FLOOR + 1.0);
    for &(x, y) in points {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y.floor());
        y1 = y1.max(y.ceil());
    }
    if !(x1 > x0) {
        (x0, x1) = (x0.min(0.0), x0.max(0.0) + 1.0);
    }
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    let mut dec = y0;
    while dec <= y1 {
        let y = sy(dec);
        let _ = writeln!(
            s,
            r##"<line x1="{MARGIN}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">1e{dec}</text>"##,
            WIDTH - MARGIN,
            MARGIN - 6.0,
            y + 4.0
        );
        dec += 1.0;
    }
    for k in 0..=4 {
        let x = x0 + (x1 - x0) * k as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{x:.4}</text>"#,
            sx(x),
            HEIGHT - MARGIN + 16.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">M</text><text x="14" y="{:.1}" transform="rotate(-90 14 {:.1})" text-anchor="middle">relative error</text>"#,
        WIDTH / 2.0,
        HEIGHT - 16.0,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
    for (idx, pts) in &series {
        let colour = PALETTE[idx % PALETTE.len()];
        let path: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.1},{:.1}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
            path.join(" ")
        );
        let ly = MARGIN + 14.0 * (*idx as f64 + 1.0);
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{ly:.1}" fill="{colour}">{}</text>"#,
            WIDTH - MARGIN - 110.0,
            order[*idx]
        );
    }
    s.push_str("</svg>\n");
    s
}
