//! Feature report serialization and tolerant reading of report files.

use std::path::Path;

use kinecoach_core::grounding::FeatureValue;
use kinecoach_core::kinematics::{TimeSeries, SCALAR_KEYS};
use kinecoach_core::prompt::StrokeContext;
use kinecoach_core::FeatureReport;
use serde_json::Value;

use crate::error::{read_text, IoError, IoResult};

/// Series drawn by the dashboard, in output order.
pub const PLOTTED_SERIES: [&str; 5] =
    ["trunk_rotation", "trunk_angular_velocity", "racket_speed", "racket_acceleration", "kinetic_energy"];

pub fn report_to_json(report: &FeatureReport) -> String {
    serde_json::to_string_pretty(report).expect("feature report serializes") + "\n"
}

pub fn read_report_value(path: &Path) -> IoResult<Value> {
    let text = read_text(path)?;
    serde_json::from_str(&text)
        .map_err(|e| IoError::Parse { path: path.into(), line: e.line() as u64, message: e.to_string() })
}

fn non_blank(v: Option<&Value>) -> Option<String> {
    v.and_then(Value::as_str).map(str::trim).filter(|s| !s.is_empty()).map(str::to_string)
}

/// Stroke label and scalars from any report-shaped JSON object. Numbers pass
/// through, numeric strings are coerced, other values are flagged as
/// non-numeric and absent keys as missing.
pub fn context_from_value(report: &Value) -> StrokeContext {
    let stroke = non_blank(report.get("predicted_stroke"))
        .or_else(|| non_blank(report.get("classification").and_then(|c| c.get("label"))))
        .unwrap_or_default();
    let values = SCALAR_KEYS
        .iter()
        .map(|key| {
            let value = match report.get(*key) {
                None | Some(Value::Null) => FeatureValue::Missing,
                Some(Value::Number(n)) => n.as_f64().map_or(FeatureValue::Missing, FeatureValue::Number),
                Some(Value::String(s)) => FeatureValue::coerce_text(s),
                Some(other) => FeatureValue::NonNumeric(other.to_string()),
            };
            (key.to_string(), value)
        })
        .collect();
    let sample_rate_hz = report.get("metadata").and_then(|m| m.get("sample_rate_hz")).and_then(Value::as_f64);
    StrokeContext { stroke, sample_rate_hz, values }
}

/// The plotted series of a report JSON; absent or malformed ones are `None`.
pub fn series_from_value(report: &Value) -> Vec<(&'static str, Option<TimeSeries>)> {
    PLOTTED_SERIES
        .iter()
        .map(|name| (*name, report.get(*name).and_then(|v| serde_json::from_value(v.clone()).ok())))
        .collect()
}
