//! Motion file formats.
//!
//! Long-form CSV, header `frame,joint,x,y,z`; an empty coordinate cell marks
//! the observation as missing.
//!
//! Wide JSON:
//!
//! ```json
//! { "sample_rate_hz": 60, "predicted_stroke": "forehand_flat",
//!   "joints": ["right_wrist", "racket_tip"],
//!   "frames": [[[0.1, 0.2, 1.0], null], ...] }
//! ```
//!
//! `null` marks a missing joint-frame; `sample_rate_hz` and `predicted_stroke`
//! are optional.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use kinecoach_core::skeleton::DEFAULT_SAMPLE_RATE_HZ;
use kinecoach_core::{impute_gaps, map_joints, CanonicalJoint, JointMapper, RawMotionTable, RawRow, SkeletonSequence, Vec3};
use serde::{Deserialize, Serialize};

use crate::error::{read_text, IoError, IoResult};

pub const CSV_HEADER: [&str; 5] = ["frame", "joint", "x", "y", "z"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MotionFormat {
    Csv,
    Json,
}

impl MotionFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(MotionFormat::Csv),
            "json" => Some(MotionFormat::Json),
            _ => None,
        }
    }
}

impl FromStr for MotionFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(MotionFormat::Csv),
            "json" => Ok(MotionFormat::Json),
            other => Err(format!("unknown motion format '{other}' (expected csv or json)")),
        }
    }
}

/// A parsed motion file before joint mapping.
#[derive(Debug, Clone)]
pub struct MotionFile {
    pub table: RawMotionTable,
    pub predicted_stroke: Option<String>,
}

/// A motion file mapped to canonical joints with gaps filled.
#[derive(Debug, Clone)]
pub struct LoadedSequence {
    pub sequence: SkeletonSequence,
    pub predicted_stroke: Option<String>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct WideMotion {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sample_rate_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    predicted_stroke: Option<String>,
    joints: Vec<String>,
    frames: Vec<Vec<Option<[f64; 3]>>>,
}

fn source_id(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Rate precedence: explicit override, then the file's own value, then 60 Hz.
fn resolve_rate(path: &Path, explicit: Option<f64>, from_file: Option<f64>) -> IoResult<f64> {
    let rate = explicit.or(from_file).unwrap_or(DEFAULT_SAMPLE_RATE_HZ);
    if rate.is_finite() && rate > 0.0 {
        Ok(rate)
    } else {
        Err(IoError::core(path, kinecoach_core::Error::InvalidSampleRate(rate)))
    }
}

fn parse_cell(path: &Path, line: u64, column: &str, cell: &str) -> IoResult<Option<f64>> {
    if cell.is_empty() {
        return Ok(None);
    }
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        _ => Err(IoError::Parse { path: path.into(), line, message: format!("invalid {column} value '{cell}'") }),
    }
}

/// Parses long-form CSV text. `path` is used for the source id and messages.
pub fn parse_csv(text: &str, path: &Path, rate: Option<f64>) -> IoResult<MotionFile> {
    if text.trim().is_empty() {
        return Err(IoError::format(path, "empty file"));
    }
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| IoError::Parse { path: path.into(), line: 1, message: e.to_string() })?;
    let names: Vec<String> = header.iter().map(|h| h.to_ascii_lowercase()).collect();
    if names != CSV_HEADER {
        return Err(IoError::Parse {
            path: path.into(),
            line: 1,
            message: format!("expected header '{}', found '{}'", CSV_HEADER.join(","), names.join(",")),
        });
    }

    let mut rows = Vec::new();
    let mut seen = BTreeSet::new();
    for record in reader.records() {
        let record = record.map_err(|e| IoError::Parse {
            path: path.into(),
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let frame: i64 = record[0].parse().map_err(|_| IoError::Parse {
            path: path.into(),
            line,
            message: format!("invalid frame index '{}'", &record[0]),
        })?;
        if frame < 0 {
            return Err(IoError::Parse { path: path.into(), line, message: format!("negative frame index {frame}") });
        }
        let joint = record[1].to_string();
        if joint.is_empty() {
            return Err(IoError::Parse { path: path.into(), line, message: "empty joint name".into() });
        }
        if !seen.insert((frame, joint.clone())) {
            return Err(IoError::Parse {
                path: path.into(),
                line,
                message: format!("duplicate observation for joint '{joint}' at frame {frame}"),
            });
        }
        let mut coords = [None; 3];
        for (k, column) in ["x", "y", "z"].iter().enumerate() {
            coords[k] = parse_cell(path, line, column, &record[2 + k])?;
        }
        let valid = coords.iter().all(Option::is_some);
        let position = Vec3::new(coords[0].unwrap_or(0.0), coords[1].unwrap_or(0.0), coords[2].unwrap_or(0.0));
        rows.push(RawRow { frame, joint, position, valid });
    }
    if rows.is_empty() {
        return Err(IoError::format(path, "no observations"));
    }
    let rate = resolve_rate(path, rate, None)?;
    let table = RawMotionTable::new(rows, rate, source_id(path)).map_err(|e| IoError::core(path, e))?;
    Ok(MotionFile { table, predicted_stroke: None })
}

/// Parses wide-form JSON text.
pub fn parse_json(text: &str, path: &Path, rate: Option<f64>) -> IoResult<MotionFile> {
    if text.trim().is_empty() {
        return Err(IoError::format(path, "empty file"));
    }
    let wide: WideMotion =
        serde_json::from_str(text).map_err(|e| IoError::Parse { path: path.into(), line: e.line() as u64, message: e.to_string() })?;
    let unique: BTreeSet<&str> = wide.joints.iter().map(String::as_str).collect();
    if unique.len() != wide.joints.len() {
        return Err(IoError::format(path, "duplicate joint name in 'joints'"));
    }
    let mut rows = Vec::with_capacity(wide.frames.len() * wide.joints.len());
    for (t, frame) in wide.frames.iter().enumerate() {
        if frame.len() != wide.joints.len() {
            return Err(IoError::format(
                path,
                format!("frame {t} has {} entries, expected {}", frame.len(), wide.joints.len()),
            ));
        }
        for (joint, cell) in wide.joints.iter().zip(frame) {
            let (position, valid) = match cell {
                Some(p) if p.iter().all(|v| v.is_finite()) => (Vec3(*p), true),
                _ => (Vec3::ZERO, false),
            };
            rows.push(RawRow { frame: t as i64, joint: joint.clone(), position, valid });
        }
    }
    let rate = resolve_rate(path, rate, wide.sample_rate_hz)?;
    let table = RawMotionTable::new(rows, rate, source_id(path)).map_err(|e| IoError::core(path, e))?;
    Ok(MotionFile { table, predicted_stroke: wide.predicted_stroke.filter(|s| !s.trim().is_empty()) })
}

pub fn parse_motion_file(path: &Path, format: Option<MotionFormat>, rate: Option<f64>) -> IoResult<MotionFile> {
    let format = format
        .or_else(|| MotionFormat::from_path(path))
        .ok_or_else(|| IoError::format(path, "cannot infer format from extension; pass --format csv|json"))?;
    let text = read_text(path)?;
    match format {
        MotionFormat::Csv => parse_csv(&text, path, rate),
        MotionFormat::Json => parse_json(&text, path, rate),
    }
}

/// Parse, map joint names and fill gaps.
pub fn load_sequence(
    path: &Path,
    format: Option<MotionFormat>,
    rate: Option<f64>,
    mapper: &JointMapper,
) -> IoResult<LoadedSequence> {
    let file = parse_motion_file(path, format, rate)?;
    let mapped = map_joints(&file.table, mapper).map_err(|e| IoError::core(path, e))?;
    let sequence = impute_gaps(&mapped.table).map_err(|e| IoError::core(path, e))?;
    Ok(LoadedSequence { sequence, predicted_stroke: file.predicted_stroke, warnings: mapped.warnings })
}

/// Long-form CSV of a table. Invalid rows get empty coordinate cells.
pub fn table_to_csv(table: &RawMotionTable) -> String {
    let mut out = String::from("frame,joint,x,y,z\n");
    for row in &table.rows {
        if row.valid {
            let [x, y, z] = row.position.0;
            let _ = writeln!(out, "{},{},{x},{y},{z}", row.frame, row.joint);
        } else {
            let _ = writeln!(out, "{},{},,,", row.frame, row.joint);
        }
    }
    out
}

/// Wide JSON of a sequence; `missing` lists (frame, joint index) cells to
/// write as `null`.
pub fn sequence_to_json(seq: &SkeletonSequence, predicted_stroke: Option<&str>, missing: &[(usize, usize)]) -> String {
    let joints: Vec<String> = seq.joints().iter().map(|j| j.name().to_string()).collect();
    let frames = (0..seq.frames())
        .map(|t| {
            seq.joints()
                .iter()
                .enumerate()
                .map(|(j, joint)| {
                    if missing.contains(&(t, j)) {
                        None
                    } else {
                        seq.position(t, *joint).map(|p| p.0)
                    }
                })
                .collect()
        })
        .collect();
    let wide = WideMotion {
        sample_rate_hz: Some(seq.sample_rate_hz()),
        predicted_stroke: predicted_stroke.map(str::to_string),
        joints,
        frames,
    };
    serde_json::to_string_pretty(&wide).expect("motion data serializes") + "\n"
}

/// Joint mapper extended with a JSON alias file: `{"alias": "canonical_name"}`.
pub fn load_mapper(path: Option<&Path>) -> IoResult<JointMapper> {
    let mut mapper = JointMapper::new();
    let Some(path) = path else { return Ok(mapper) };
    let aliases: BTreeMap<String, String> =
        serde_json::from_str(&read_text(path)?).map_err(|e| IoError::format(path, e.to_string()))?;
    for (alias, name) in aliases {
        let joint = CanonicalJoint::from_name(&name)
            .ok_or_else(|| IoError::format(path, format!("alias '{alias}': unknown canonical joint '{name}'")))?;
        mapper.add_alias(&alias, joint);
    }
    Ok(mapper)
}
