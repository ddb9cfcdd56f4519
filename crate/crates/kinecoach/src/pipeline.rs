//! Batch pipeline: motion file → report → findings → prompt → feedback →
//! compliance, one output directory per stroke.
//!
//! ```text
//! <out>/summary.json
//! <out>/<stroke id>/report.json
//!                   findings.txt
//!                   prompt.txt
//!                   feedback.txt      (not in dry-run)
//!                   compliance.json
//!                   plots/*.csv, plots/*.svg
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use kinecoach_core::kinematics::{FeatureConfig, UpAxis};
use kinecoach_core::prompt::build_report_prompt;
use kinecoach_core::{build_feature_report, check_feedback, compare_report, Finding, JointMapper, ReferenceTable};
use serde::Serialize;
use serde_json::json;

use crate::dashboard::{emit_dashboard_data, report_series};
use crate::error::{write_text, IoError, IoResult};
use crate::formats::{load_sequence, MotionFormat};
use crate::llm::{generate_feedback, LlmConfig};
use crate::report_io::report_to_json;

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub inputs: Vec<PathBuf>,
    pub format: Option<MotionFormat>,
    /// Overrides the rate stored in the files.
    pub rate: Option<f64>,
    pub up_axis: UpAxis,
    /// Overrides the stroke label stored in the files.
    pub stroke: Option<String>,
    pub ranges: ReferenceTable,
    pub out_dir: PathBuf,
    pub dry_run: bool,
    pub jobs: usize,
    pub llm: LlmConfig,
    pub mapper: JointMapper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StrokeStatus {
    Ok,
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FeedbackStatus {
    Skipped,
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrokeSummary {
    pub id: String,
    pub source: String,
    pub status: StrokeStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stroke: Option<String>,
    pub verdicts: BTreeMap<String, String>,
    pub feedback: FeedbackStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub feedback_error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub compliance_pass: Option<bool>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchSummary {
    pub dry_run: bool,
    pub total: usize,
    pub succeeded: usize,
    pub hard_failures: usize,
    pub strokes: Vec<StrokeSummary>,
}

impl BatchSummary {
    pub fn exit_code(&self) -> i32 {
        i32::from(self.hard_failures > 0)
    }
}

/// Output directory names: file stems, made unique with a numeric suffix in
/// input order.
pub fn stroke_ids(inputs: &[PathBuf]) -> Vec<String> {
    let mut used = BTreeSet::new();
    inputs
        .iter()
        .map(|p| {
            let stem: String = p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "stroke".into())
                .chars()
                .map(|c| if c.is_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '_' })
                .collect();
            let mut id = stem.clone();
            let mut n = 2;
            while !used.insert(id.clone()) {
                id = format!("{stem}_{n}");
                n += 1;
            }
            id
        })
        .collect()
}

pub fn findings_text(findings: &[Finding]) -> String {
    findings.iter().map(|f| format!("{}\n", f.rendered)).collect()
}

fn process_stroke(path: &Path, id: &str, config: &PipelineConfig) -> StrokeSummary {
    let mut summary = StrokeSummary {
        id: id.to_string(),
        source: path.display().to_string(),
        status: StrokeStatus::Ok,
        error: None,
        stroke: None,
        verdicts: BTreeMap::new(),
        feedback: FeedbackStatus::Skipped,
        feedback_error: None,
        compliance_pass: None,
        warnings: Vec::new(),
    };
    if let Err(e) = run_stroke(path, id, config, &mut summary) {
        summary.status = StrokeStatus::Error;
        summary.error = Some(e.to_string());
    }
    summary
}

fn run_stroke(path: &Path, id: &str, config: &PipelineConfig, summary: &mut StrokeSummary) -> IoResult<()> {
    let loaded = load_sequence(path, config.format, config.rate, &config.mapper)?;
    summary.warnings = loaded.warnings;
    let label = config.stroke.clone().or(loaded.predicted_stroke);
    let features = FeatureConfig { up_axis: config.up_axis };
    let report = build_feature_report(&loaded.sequence, label.as_deref(), &features)
        .map_err(|e| IoError::core(path, e))?;
    summary.stroke = Some(report.stroke_label().to_string());

    let findings = compare_report(&report, &config.ranges);
    summary.verdicts = findings.iter().map(|f| (f.feature.clone(), f.verdict.to_string())).collect();
    let bundle = build_report_prompt(&report, &findings);

    let dir = config.out_dir.join(id);
    write_text(&dir.join("report.json"), &report_to_json(&report))?;
    write_text(&dir.join("findings.txt"), &findings_text(&findings))?;
    write_text(&dir.join("prompt.txt"), &bundle.render())?;
    emit_dashboard_data(&report_series(&report), &dir.join("plots"))?;

    let compliance = if config.dry_run {
        json!({"status": "skipped", "reason": "dry run: no feedback requested"})
    } else {
        let feedback = generate_feedback(&bundle, &config.llm);
        write_text(&dir.join("feedback.txt"), &format!("{}\n", feedback.text.trim_end()))?;
        if feedback.ok {
            summary.feedback = FeedbackStatus::Ok;
            let check = check_feedback(&feedback.text, &bundle, &findings);
            summary.compliance_pass = Some(check.pass);
            let mut value = serde_json::to_value(&check)?;
            value["status"] = json!("checked");
            value
        } else {
            summary.feedback = FeedbackStatus::Failed;
            summary.feedback_error = Some(feedback.text.clone());
            json!({"status": "skipped", "reason": feedback.text})
        }
    };
    write_text(&dir.join("compliance.json"), &(serde_json::to_string_pretty(&compliance)? + "\n"))?;
    Ok(())
}

/// Processes every input, up to `jobs` at a time. Per-stroke failures are
/// recorded in the summary and never stop the batch.
pub fn run_pipeline(config: &PipelineConfig) -> IoResult<BatchSummary> {
    let mut inputs = config.inputs.clone();
    inputs.sort();
    inputs.dedup();
    let ids = stroke_ids(&inputs);

    let slots: Mutex<Vec<Option<StrokeSummary>>> = Mutex::new(vec![None; inputs.len()]);
    let next = AtomicUsize::new(0);
    let workers = config.jobs.clamp(1, inputs.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(path) = inputs.get(i) else { break };
                let summary = process_stroke(path, &ids[i], config);
                slots.lock().expect("no worker panics while holding the lock")[i] = Some(summary);
            });
        }
    });

    let strokes: Vec<StrokeSummary> =
        slots.into_inner().expect("workers joined").into_iter().map(|s| s.expect("every input processed")).collect();
    let hard_failures = strokes.iter().filter(|s| s.status == StrokeStatus::Error).count();
    let summary = BatchSummary {
        dry_run: config.dry_run,
        total: strokes.len(),
        succeeded: strokes.len() - hard_failures,
        hard_failures,
        strokes,
    };
    write_text(&config.out_dir.join("summary.json"), &(serde_json::to_string_pretty(&summary)? + "\n"))?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_unique_and_stable() {
        let inputs: Vec<PathBuf> = ["a/x.csv", "b/x.json", "c/y z.csv"].iter().map(PathBuf::from).collect();
        assert_eq!(stroke_ids(&inputs), vec!["x", "x_2", "y_z"]);
    }
}
