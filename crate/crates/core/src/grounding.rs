//! Stroke-specific optimal intervals and per-feature findings.
//!
//! A value below its interval is reported as `(lo − v) / (hi − lo + ε) · 100`
//! percent below range, above it as `(v − hi) / (hi − lo + ε) · 100` percent
//! above, with ε = 1e-9 so a zero-width interval still yields a finite number.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{FeatureReport, SCALAR_KEYS};

pub const DEVIATION_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi, units: None, provenance: None }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    /// Relative distance outside the interval in percent; 0 inside.
    pub fn deviation_pct(&self, v: f64) -> f64 {
        let width = self.hi - self.lo + DEVIATION_EPSILON;
        if v < self.lo {
            (self.lo - v) / width * 100.0
        } else if v > self.hi {
            (v - self.hi) / width * 100.0
        } else {
            0.0
        }
    }
}

/// stroke type → feature → optimal interval. Keys are lowercased on insert.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ReferenceTable {
    strokes: BTreeMap<String, BTreeMap<String, Interval>>,
}

impl ReferenceTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Validates every interval and normalizes key case. Returns the table and
    /// a warning for every feature key that is not a known scalar feature.
    pub fn from_map(strokes: BTreeMap<String, BTreeMap<String, Interval>>) -> Result<(Self, Vec<String>)> {
        let mut table = ReferenceTable::new();
        let mut warnings = Vec::new();
        for (stroke, features) in strokes {
            for (feature, interval) in features {
                if !SCALAR_KEYS.contains(&feature.to_lowercase().as_str()) {
                    warnings.push(format!("unknown feature '{feature}' in reference ranges for '{stroke}'"));
                }
                table.insert(&stroke, &feature, interval)?;
            }
        }
        Ok((table, warnings))
    }

    pub fn insert(&mut self, stroke: &str, feature: &str, interval: Interval) -> Result<()> {
        if !(interval.lo <= interval.hi) {
            return Err(Error::InvalidInterval {
                stroke: stroke.to_string(),
                feature: feature.to_string(),
                lo: interval.lo,
                hi: interval.hi,
            });
        }
        self.strokes
            .entry(stroke.to_lowercase())
            .or_default()
            .insert(feature.to_lowercase(), interval);
        Ok(())
    }

    pub fn stroke(&self, stroke: &str) -> Option<&BTreeMap<String, Interval>> {
        self.strokes.get(&stroke.to_lowercase())
    }

    pub fn get(&self, stroke: &str, feature: &str) -> Option<&Interval> {
        self.stroke(stroke)?.get(&feature.to_lowercase())
    }

    pub fn strokes(&self) -> impl Iterator<Item = &str> {
        self.strokes.keys().map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.strokes.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Ok,
    Low,
    High,
    Missing,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Ok => "OK",
            Verdict::Low => "LOW",
            Verdict::High => "HIGH",
            Verdict::Missing => "MISSING",
        })
    }
}

/// A feature value as handed to the comparator.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureValue {
    Number(f64),
    NonNumeric(String),
    Missing,
}

impl From<Option<f64>> for FeatureValue {
    fn from(v: Option<f64>) -> Self {
        match v {
            Some(x) if x.is_finite() => FeatureValue::Number(x),
            Some(x) => FeatureValue::NonNumeric(format!("{x}")),
            None => FeatureValue::Missing,
        }
    }
}

impl FeatureValue {
    /// Coerces text such as `"27.5"` to a number; anything else stays as is.
    pub fn coerce_text(text: &str) -> FeatureValue {
        match text.trim().parse::<f64>() {
            Ok(x) if x.is_finite() => FeatureValue::Number(x),
            _ => FeatureValue::NonNumeric(text.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub feature: String,
    pub value: Option<f64>,
    pub verdict: Verdict,
    /// 0 when OK, absent when MISSING.
    pub deviation_pct: Option<f64>,
    pub interval: Option<Interval>,
    pub rendered: String,
}

/// Human label used in rendered findings.
pub fn feature_label(feature: &str) -> String {
    let label = match feature {
        "racket_velocity_max" => "Racket velocity",
        "peak_power" => "Peak power",
        "rotation_range_deg" => "Rotation range",
        "stroke_duration_frames" => "Stroke duration",
        "stroke_duration_s" => "Stroke duration (s)",
        "peak_angular_velocity" => "Peak angular velocity",
        "impact_timing_pct" => "Impact timing",
        "kinetic_chain_pct" => "Kinetic chain timing",
        other => return other.to_string(),
    };
    label.to_string()
}

fn finding(feature: &str, value: &FeatureValue, interval: &Interval) -> Finding {
    let label = feature_label(feature);
    let (lo, hi) = (interval.lo, interval.hi);
    let (value, verdict, deviation_pct, rendered) = match value {
        FeatureValue::Number(v) => {
            let v = *v;
            let dev = interval.deviation_pct(v);
            if v < lo {
                (Some(v), Verdict::Low, Some(dev), format!("{label} LOW: {v:.2} vs optimal {lo}–{hi} (≈{dev:.2}% below range)."))
            } else if v > hi {
                (Some(v), Verdict::High, Some(dev), format!("{label} HIGH: {v:.2} vs optimal {lo}–{hi} (≈{dev:.2}% above range)."))
            } else {
                (Some(v), Verdict::Ok, Some(0.0), format!("{label} OK: {v:.2} within optimal {lo}–{hi}."))
            }
        }
        FeatureValue::NonNumeric(text) => (
            None,
            Verdict::Missing,
            None,
            format!("{label} MISSING: non-numeric value \"{text}\" (optimal {lo}–{hi})."),
        ),
        FeatureValue::Missing => {
            (None, Verdict::Missing, None, format!("{label} MISSING: value unavailable (optimal {lo}–{hi})."))
        }
    };
    Finding { feature: feature.to_string(), value, verdict, deviation_pct, interval: Some(interval.clone()), rendered }
}

/// Compares feature values against the intervals for `stroke`.
///
/// Findings follow the order of `values`; intervals for features that are not
/// in `values` come last as MISSING. If the stroke has no entry every value
/// yields a MISSING finding without an interval.
pub fn compare_to_reference(stroke: &str, values: &[(String, FeatureValue)], table: &ReferenceTable) -> Vec<Finding> {
    let Some(intervals) = table.stroke(stroke) else {
        return values
            .iter()
            .map(|(feature, value)| Finding {
                feature: feature.clone(),
                value: match value {
                    FeatureValue::Number(v) => Some(*v),
                    _ => None,
                },
                verdict: Verdict::Missing,
                deviation_pct: None,
                interval: None,
                rendered: format!("{} MISSING: no reference range for stroke '{stroke}'.", feature_label(feature)),
            })
            .collect();
    };

    let mut out = Vec::new();
    for (feature, value) in values {
        if let Some(interval) = intervals.get(&feature.to_lowercase()) {
            out.push(finding(feature, value, interval));
        }
    }
    for (feature, interval) in intervals {
        if !values.iter().any(|(f, _)| f.to_lowercase() == *feature) {
            out.push(finding(feature, &FeatureValue::Missing, interval));
        }
    }
    out
}

/// Report scalars as comparator input, in the fixed key order.
pub fn report_values(report: &FeatureReport) -> Vec<(String, FeatureValue)> {
    report.scalars().iter().map(|(k, v)| (k.to_string(), FeatureValue::from(*v))).collect()
}

pub fn compare_report(report: &FeatureReport, table: &ReferenceTable) -> Vec<Finding> {
    compare_to_reference(report.stroke_label(), &report_values(report), table)
}
