//! Minimal SVG output: step plots of velocity tables, line curves and
//! nested rectangle snapshots. Coordinates are printed with fixed precision
//! so reruns are byte-identical.

use std::fmt::Write;

use crate::rational::to_f64;
use crate::table::VelocityTable;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 50.0;
const COLORS: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

struct Frame {
    x_max: f64,
    y_max: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        MARGIN + v / self.x_max * (WIDTH - 2.0 * MARGIN)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT - MARGIN - v / self.y_max * (HEIGHT - 2.0 * MARGIN)
    }
}

fn header(out: &mut String, title: &str, x_label: &str, y_label: &str, frame: &Frame) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(title));
    let (x0, y0) = (frame.x(0.0), frame.y(0.0));
    let _ = writeln!(
        out,
        r#"<path d="M{x0:.2} {:.2} L{x0:.2} {y0:.2} L{:.2} {y0:.2}" stroke="black" fill="none"/>"#,
        MARGIN,
        WIDTH - MARGIN
    );
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, WIDTH / 2.0, HEIGHT - 12.0, escape(x_label));
    let _ = writeln!(
        out,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );
    for (value, anchor) in [(frame.x_max, "x"), (frame.y_max, "y")] {
        let (px, py) = if anchor == "x" { (frame.x(value), y0 + 16.0) } else { (x0 - 6.0, frame.y(value)) };
        let align = if anchor == "x" { "middle" } else { "end" };
        let _ = writeln!(out, r#"<text x="{px:.2}" y="{py:.2}" text-anchor="{align}">{value:.3}</text>"#);
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn legend(out: &mut String, names: &[&str]) {
    for (i, name) in names.iter().enumerate() {
        let y = MARGIN + 16.0 * i as f64;
        let color = COLORS[i % COLORS.len()];
        let _ = writeln!(
            out,
            r#"<rect x="{:.2}" y="{:.2}" width="10" height="10" fill="{color}"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            WIDTH - MARGIN - 120.0,
            y - 9.0,
            WIDTH - MARGIN - 105.0,
            y,
            escape(name)
        );
    }
}

fn staircase_path(table: &VelocityTable, frame: &Frame) -> String {
    let mut d = String::new();
    for (lo, hi, f) in table.intervals() {
        let (x0, x1, y) = (frame.x(to_f64(&lo)), frame.x(to_f64(&hi)), frame.y(f as f64));
        let _ = write!(d, "M{x0:.2} {y:.2} L{x1:.2} {y:.2} ");
    }
    d.trim_end().to_string()
}

/// Step plot of `tables[0]` with dashed markers at its breakpoints; the
/// remaining tables are drawn as overlays.
pub fn staircase(title: &str, tables: &[(&str, &VelocityTable)]) -> String {
    let x_max = tables.iter().map(|(_, t)| to_f64(&t.y_max)).fold(0.0, f64::max).max(1e-9);
    let y_max = tables
        .iter()
        .flat_map(|(_, t)| t.values.iter().copied())
        .max()
        .unwrap_or(0)
        .max(1) as f64;
    let frame = Frame { x_max, y_max };
    let mut out = String::new();
    header(&mut out, title, "Y", "f", &frame);
    if let Some((_, main)) = tables.first() {
        for b in &main.breakpoints {
            let x = frame.x(to_f64(b));
            let _ = writeln!(
                out,
                r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#999" stroke-dasharray="3 3"/>"##,
                frame.y(0.0),
                frame.y(y_max)
            );
        }
    }
    for (i, (_, t)) in tables.iter().enumerate().rev() {
        let width = if i == 0 { 2.5 } else { 1.5 };
        let _ = writeln!(
            out,
            r#"<path d="{}" stroke="{}" stroke-width="{width}" fill="none"/>"#,
            staircase_path(t, &frame),
            COLORS[i % COLORS.len()]
        );
    }
    legend(&mut out, &tables.iter().map(|(n, _)| *n).collect::<Vec<_>>());
    out.push_str("</svg>\n");
    out
}

/// Polylines through `(x, y)` samples.
pub fn curves(title: &str, x_label: &str, y_label: &str, series: &[(&str, Vec<(f64, f64)>)]) -> String {
    let pts = series.iter().flat_map(|(_, s)| s.iter());
    let (x_max, y_max) = pts.fold((1e-9f64, 1e-9f64), |(a, b), (x, y)| (a.max(*x), b.max(*y)));
    let frame = Frame { x_max, y_max: y_max * 1.05 };
    let mut out = String::new();
    header(&mut out, title, x_label, y_label, &frame);
    for (i, (_, s)) in series.iter().enumerate() {
        let points: Vec<String> =
            s.iter().map(|(x, y)| format!("{:.2},{:.2}", frame.x(*x), frame.y(*y))).collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" stroke="{}" stroke-width="2" fill="none"/>"#,
            points.join(" "),
            COLORS[i % COLORS.len()]
        );
    }
    legend(&mut out, &series.iter().map(|(n, _)| *n).collect::<Vec<_>>());
    out.push_str("</svg>\n");
    out
}

/// Nested rectangles `[left, right, bottom, top]` in physical units, one
/// outline per snapshot, drawn on a common square frame.
pub fn rectangles(title: &str, snapshots: &[(String, [f64; 4])]) -> String {
    let extent = snapshots
        .iter()
        .flat_map(|(_, b)| b.iter().map(|v| v.abs()))
        .fold(1e-9f64, f64::max);
    let side = HEIGHT - 2.0 * MARGIN;
    let scale = side / (2.0 * extent);
    let (cx, cy) = (WIDTH / 2.0, HEIGHT / 2.0);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(title));
    for (i, (label, [l, r, b, t])) in snapshots.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let _ = writeln!(
            out,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" stroke="{color}" stroke-width="1.5" fill="none"><title>{}</title></rect>"#,
            cx + l * scale,
            cy - t * scale,
            (r - l) * scale,
            (t - b) * scale,
            escape(label)
        );
    }
    let names: Vec<&str> = snapshots.iter().map(|(n, _)| n.as_str()).collect();
    legend(&mut out, &names);
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use crate::side_law::SideLawParams;

    #[test]
    fn staircase_is_well_formed_and_stable() {
        let p = SideLawParams::new(int(1), int(1), frac(1, 4)).unwrap();
        let t = p.velocity_table(int(3)).unwrap();
        let a = staircase("f", &[("f", &t)]);
        assert!(a.starts_with("<svg") && a.trim_end().ends_with("</svg>"));
        assert_eq!(a.matches("stroke-dasharray").count(), t.breakpoints.len());
        assert_eq!(a, staircase("f", &[("f", &t)]));
    }

    #[test]
    fn rectangles_and_curves() {
        let r = rectangles("E", &[("t=0".into(), [-1.0, 1.0, -1.0, 1.0]), ("t=1".into(), [-0.5, 0.5, -0.5, 0.5])]);
        assert_eq!(r.matches("<title>").count(), 2);
        let c = curves("c", "x", "y", &[("a", vec![(0.0, 1.0), (1.0, 2.0)])]);
        assert!(c.contains("<polyline"));
    }
}
