//! Deterministic system/user prompt construction for the coaching model.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;
use serde::{Deserialize, Serialize};

use crate::grounding::{report_values, FeatureValue, Finding};
use crate::kinematics::FeatureReport;
use crate::numeric::scan_numbers;

pub const SYSTEM_PROMPT: &str = "You are a precise, evidence-based tennis coach.";
pub const COMPARISON_HEADING: &str = "Optimal-range comparison:";
pub const UNKNOWN_STROKE: &str = "UNKNOWN";

/// Scalars listed in the raw-feature block, in order.
pub const LISTED_SCALARS: [&str; 7] = [
    "racket_velocity_max",
    "peak_power",
    "rotation_range_deg",
    "stroke_duration_frames",
    "stroke_duration_s",
    "peak_angular_velocity",
    "impact_timing_pct",
];

const FORMAT_RULES: &str = "\
Respond in exactly this format:
- First line: \"Overall Score: X/10\" where X is an integer (0 = very poor, 10 = perfect).
- Then a concise diagnostic summary of 2-3 sentences.
- Then the heading \"Actionable Corrections:\" followed by exactly three numbered corrections.
Adhere strictly to the optimal-range comparison above: call a feature high or low only as it is reported there.
Do not fabricate numerical values; use only numbers that appear in this prompt.";

/// What the prompt needs to know about one stroke.
#[derive(Debug, Clone, PartialEq)]
pub struct StrokeContext {
    /// Resolved stroke label; blank resolves to `"UNKNOWN"`.
    pub stroke: String,
    pub sample_rate_hz: Option<f64>,
    pub values: Vec<(String, FeatureValue)>,
}

impl StrokeContext {
    pub fn from_report(report: &FeatureReport) -> Self {
        StrokeContext {
            stroke: report.stroke_label().to_string(),
            sample_rate_hz: Some(report.metadata.sample_rate_hz),
            values: report_values(report),
        }
    }

    pub fn stroke_label(&self) -> &str {
        if self.stroke.trim().is_empty() {
            UNKNOWN_STROKE
        } else {
            &self.stroke
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub system_prompt: String,
    pub user_prompt: String,
    /// Every numeric literal in `user_prompt`.
    pub input_numbers: BTreeSet<String>,
}

impl PromptBundle {
    /// System and user prompt as one text artifact.
    pub fn render(&self) -> String {
        format!("[system]\n{}\n\n[user]\n{}\n", self.system_prompt, self.user_prompt)
    }
}

fn render_value(value: Option<&FeatureValue>) -> String {
    match value {
        Some(FeatureValue::Number(v)) => format!("{v:.2}"),
        Some(FeatureValue::NonNumeric(text)) => format!("\"{text}\""),
        Some(FeatureValue::Missing) | None => "n/a".to_string(),
    }
}

/// Builds the prompt pair: stroke type, the comparison lines, a compact
/// listing of the raw scalars (two decimals) and the output-format rules.
pub fn build_context_summary(context: &StrokeContext, findings: &[Finding]) -> PromptBundle {
    let stroke = context.stroke_label();
    let mut user = String::new();
    let _ = writeln!(user, "Stroke type: {stroke}");
    if let Some(rate) = context.sample_rate_hz {
        let _ = writeln!(user, "Sampling rate: {rate:.2} Hz");
    }
    let _ = writeln!(user);
    let _ = writeln!(user, "{COMPARISON_HEADING}");
    if findings.is_empty() {
        let _ = writeln!(user, "- (no reference comparisons available)");
    }
    for finding in findings {
        let _ = writeln!(user, "- {}", finding.rendered);
    }
    let _ = writeln!(user);
    let _ = writeln!(user, "Raw features:");
    let _ = writeln!(user, "- predicted_stroke: {stroke}");
    for key in LISTED_SCALARS {
        let value = context.values.iter().find(|(k, _)| k == key).map(|(_, v)| v);
        let _ = writeln!(user, "- {key}: {}", render_value(value));
    }
    let _ = writeln!(user);
    user.push_str(FORMAT_RULES);

    let input_numbers = scan_numbers(&user).into_iter().map(|t| t.text).collect();
    PromptBundle { system_prompt: SYSTEM_PROMPT.to_string(), user_prompt: user, input_numbers }
}

/// Convenience wrapper over [`build_context_summary`] for a full report.
pub fn build_report_prompt(report: &FeatureReport, findings: &[Finding]) -> PromptBundle {
    build_context_summary(&StrokeContext::from_report(report), findings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grounding::{compare_to_reference, Interval, ReferenceTable};
    use alloc::vec;

    fn context(stroke: &str, racket: f64) -> StrokeContext {
        StrokeContext {
            stroke: stroke.into(),
            sample_rate_hz: Some(60.0),
            values: vec![("racket_velocity_max".into(), FeatureValue::Number(racket))],
        }
    }

    #[test]
    fn absent_stroke_is_unknown() {
        let bundle = build_context_summary(&context("", 30.0), &[]);
        assert!(bundle.user_prompt.starts_with("Stroke type: UNKNOWN\n"));
        assert!(bundle.user_prompt.contains("- predicted_stroke: UNKNOWN"));
    }

    #[test]
    fn deterministic() {
        let a = build_context_summary(&context("backhand", 30.0), &[]);
        let b = build_context_summary(&context("backhand", 30.0), &[]);
        assert_eq!(a, b);
    }

    #[test]
    fn finding_line_under_heading() {
        let mut table = ReferenceTable::new();
        table.insert("forehand_flat", "racket_velocity_max", Interval::new(25.0, 35.0)).unwrap();
        let ctx = context("forehand_flat", 20.0);
        let findings = compare_to_reference(&ctx.stroke, &ctx.values, &table);
        let bundle = build_context_summary(&ctx, &findings);
        let heading = bundle.user_prompt.find(COMPARISON_HEADING).unwrap();
        let line = bundle.user_prompt.find(&findings[0].rendered).unwrap();
        let raw = bundle.user_prompt.find("Raw features:").unwrap();
        assert!(heading < line && line < raw);
        assert!(bundle.user_prompt.contains("- racket_velocity_max: 20.00"));
        assert!(bundle.user_prompt.contains("- peak_power: n/a"));
        assert_eq!(bundle.system_prompt, "You are a precise, evidence-based tennis coach.");
    }

    #[test]
    fn input_numbers_cover_prompt_literals() {
        let bundle = build_context_summary(&context("serve", 27.25), &[]);
        for n in ["27.25", "60.00", "10", "0"] {
            assert!(bundle.input_numbers.contains(n), "{n}");
        }
    }
}
