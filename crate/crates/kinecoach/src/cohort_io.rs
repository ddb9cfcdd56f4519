//! Cohort sample CSV input and statistics output.
//!
//! Samples CSV header:
//! `group,source_id,racket_velocity_max,rotation_range_deg,peak_angular_velocity,stroke_duration_s`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use kinecoach_core::stats::{run_cohort_analysis, BoxPlot, CohortSample, CohortStats, Group, COHORT_FEATURES};
use serde::Deserialize;

use crate::error::{read_text, write_text, IoError, IoResult};

#[derive(Debug, Deserialize)]
struct SampleRow {
    group: String,
    source_id: String,
    racket_velocity_max: f64,
    rotation_range_deg: f64,
    peak_angular_velocity: f64,
    stroke_duration_s: f64,
}

pub fn parse_samples(text: &str, path: &Path) -> IoResult<Vec<CohortSample>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let parse_err = |line: u64, e: csv::Error| IoError::Parse { path: path.into(), line, message: e.to_string() };
    let headers = reader.headers().map_err(|e| parse_err(1, e))?.clone();
    let mut samples = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| parse_err(e.position().map_or(0, |p| p.line()), e))?;
        let line = record.position().map_or(0, |p| p.line());
        let row: SampleRow = record.deserialize(Some(&headers)).map_err(|e| parse_err(line, e))?;
        let group: Group = row.group.parse().map_err(|m| IoError::Parse { path: path.into(), line, message: m })?;
        let sample = CohortSample {
            group,
            source_id: row.source_id,
            racket_velocity_max: row.racket_velocity_max,
            rotation_range_deg: row.rotation_range_deg,
            peak_angular_velocity: row.peak_angular_velocity,
            stroke_duration_s: row.stroke_duration_s,
        };
        if COHORT_FEATURES.iter().any(|f| !sample.feature(f).unwrap().is_finite()) {
            return Err(IoError::Parse { path: path.into(), line, message: "non-finite feature value".into() });
        }
        samples.push(sample);
    }
    Ok(samples)
}

pub fn read_samples(path: &Path) -> IoResult<Vec<CohortSample>> {
    parse_samples(&read_text(path)?, path)
}

pub fn analyze(path: &Path) -> IoResult<(CohortStats, Vec<BoxPlot>)> {
    let samples = read_samples(path)?;
    run_cohort_analysis(&samples).map_err(|e| IoError::core(path, e))
}

/// Box-plot rows for one feature; outliers are `;`-separated.
pub fn box_plot_csv(plots: &[BoxPlot], feature: &str) -> String {
    let mut out = String::from("group,q1,median,q3,lo_whisker,hi_whisker,outliers\n");
    for b in plots.iter().filter(|b| b.feature == feature) {
        let outliers: Vec<String> = b.outliers.iter().map(f64::to_string).collect();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            b.group.as_str(),
            b.q1,
            b.median,
            b.q3,
            b.lo_whisker,
            b.hi_whisker,
            outliers.join(";")
        );
    }
    out
}

/// Writes `<feature>_boxplot.csv` for each cohort feature.
pub fn write_box_plots(plots: &[BoxPlot], dir: &Path) -> IoResult<Vec<PathBuf>> {
    let mut written = Vec::new();
    for feature in COHORT_FEATURES {
        let path = dir.join(format!("{feature}_boxplot.csv"));
        write_text(&path, &box_plot_csv(plots, feature))?;
        written.push(path);
    }
    Ok(written)
}

pub fn stats_to_json(stats: &CohortStats) -> String {
    serde_json::to_string_pretty(stats).expect("cohort stats serialize") + "\n"
}
