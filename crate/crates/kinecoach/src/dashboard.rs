//! Plot data: a `frame,value` CSV and a small SVG line chart per series.

use std::fmt::Write as _;
use std::path::Path;

use kinecoach_core::kinematics::TimeSeries;
use kinecoach_core::FeatureReport;

use crate::error::{write_text, IoResult};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 240.0;
const MARGIN: f64 = 40.0;

pub fn report_series(report: &FeatureReport) -> Vec<(&'static str, Option<TimeSeries>)> {
    vec![
        ("trunk_rotation", report.trunk_rotation.clone()),
        ("trunk_angular_velocity", report.trunk_angular_velocity.clone()),
        ("racket_speed", Some(report.racket_speed.clone())),
        ("racket_acceleration", report.racket_acceleration.clone()),
        ("kinetic_energy", Some(report.kinetic_energy.clone())),
    ]
}

pub fn series_csv(series: &TimeSeries) -> String {
    let mut out = String::from("frame,value\n");
    for (i, v) in series.values.iter().enumerate() {
        let _ = writeln!(out, "{},{v}", series.start_frame + i);
    }
    out
}

pub fn series_svg(title: &str, series: &TimeSeries) -> String {
    let (lo, hi) = match (series.min(), series.max()) {
        (Some(lo), Some(hi)) => (lo, hi),
        _ => (0.0, 0.0),
    };
    let n = series.len();
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let x = |i: usize| if n > 1 { MARGIN + plot_w * i as f64 / (n - 1) as f64 } else { MARGIN };
    let y = |v: f64| {
        if hi > lo {
            HEIGHT - MARGIN - plot_h * (v - lo) / (hi - lo)
        } else {
            HEIGHT / 2.0
        }
    };
    let points: Vec<String> =
        series.values.iter().enumerate().map(|(i, v)| format!("{:.2},{:.2}", x(i), y(*v))).collect();
    let first = series.start_frame;
    let last = series.start_frame + n.saturating_sub(1);
    let (left, bottom, right, top) = (MARGIN, HEIGHT - MARGIN, WIDTH - MARGIN, MARGIN);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#);
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{left}" y="20" font-family="sans-serif" font-size="14">{title}</text>"#);
    let _ = writeln!(svg, r#"<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="black"/>"#);
    let _ = writeln!(svg, r#"<line x1="{left}" y1="{top}" x2="{left}" y2="{bottom}" stroke="black"/>"#);
    let _ = writeln!(svg, r#"<text x="{left}" y="{}" font-family="sans-serif" font-size="10">{first}</text>"#, bottom + 14.0);
    let _ = writeln!(svg, r#"<text x="{right}" y="{}" font-family="sans-serif" font-size="10" text-anchor="end">{last}</text>"#, bottom + 14.0);
    let _ = writeln!(svg, r#"<text x="{}" y="{top}" font-family="sans-serif" font-size="10" text-anchor="end">{hi:.2}</text>"#, left - 4.0);
    let _ = writeln!(svg, r#"<text x="{}" y="{bottom}" font-family="sans-serif" font-size="10" text-anchor="end">{lo:.2}</text>"#, left - 4.0);
    let _ = writeln!(svg, r#"<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{}"/>"#, points.join(" "));
    svg.push_str("</svg>\n");
    svg
}

/// Writes `<name>.csv` and `<name>.svg` for every present series and
/// returns a note for each absent one (also written to `notes.txt`).
pub fn emit_dashboard_data(series: &[(&str, Option<TimeSeries>)], out_dir: &Path) -> IoResult<Vec<String>> {
    let mut notes = Vec::new();
    for (name, s) in series {
        match s {
            Some(s) if !s.is_empty() => {
                write_text(&out_dir.join(format!("{name}.csv")), &series_csv(s))?;
                write_text(&out_dir.join(format!("{name}.svg")), &series_svg(name, s))?;
            }
            _ => notes.push(format!("{name}: series unavailable, plot skipped")),
        }
    }
    if !notes.is_empty() {
        write_text(&out_dir.join("notes.txt"), &(notes.join("\n") + "\n"))?;
    }
    Ok(notes)
}
