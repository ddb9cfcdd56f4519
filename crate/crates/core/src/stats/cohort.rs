//! Expert-vs-beginner comparison over the four cohort scalars.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::hypothesis::{choose_test, cohens_d, mann_whitney_u, welch_t, TestKind};
use crate::error::{Error, Result};
use crate::kinematics::{unwrap_angles, TimeSeries};

pub const COHORT_FEATURES: [&str; 4] =
    ["racket_velocity_max", "rotation_range_deg", "peak_angular_velocity", "stroke_duration_s"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Expert,
    Beginner,
}

impl Group {
    pub fn as_str(self) -> &'static str {
        match self {
            Group::Expert => "expert",
            Group::Beginner => "beginner",
        }
    }
}

impl core::str::FromStr for Group {
    type Err = String;

    fn from_str(s: &str) -> core::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "expert" => Ok(Group::Expert),
            "beginner" => Ok(Group::Beginner),
            other => Err(format!("unknown group '{other}' (expected expert or beginner)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortSample {
    pub group: Group,
    pub source_id: String,
    pub racket_velocity_max: f64,
    pub rotation_range_deg: f64,
    pub peak_angular_velocity: f64,
    pub stroke_duration_s: f64,
}

impl CohortSample {
    pub fn feature(&self, name: &str) -> Option<f64> {
        match name {
            "racket_velocity_max" => Some(self.racket_velocity_max),
            "rotation_range_deg" => Some(self.rotation_range_deg),
            "peak_angular_velocity" => Some(self.peak_angular_velocity),
            "stroke_duration_s" => Some(self.stroke_duration_s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureComparison {
    pub feature: String,
    pub test_used: TestKind,
    pub statistic: f64,
    pub p_value: f64,
    /// Expert minus beginner. Absent when the pooled variance is zero.
    pub cohens_d: Option<f64>,
    pub n_expert: usize,
    pub n_beginner: usize,
    pub normality_p_expert: Option<f64>,
    pub normality_p_beginner: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxPlot {
    pub feature: String,
    pub group: Group,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub lo_whisker: f64,
    pub hi_whisker: f64,
    pub outliers: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortStats {
    pub n_expert: usize,
    pub n_beginner: usize,
    pub features: Vec<FeatureComparison>,
    pub warnings: Vec<String>,
}

impl CohortStats {
    /// The comparison with the largest |d|.
    pub fn largest_effect(&self) -> Option<&FeatureComparison> {
        self.features
            .iter()
            .filter(|f| f.cohens_d.is_some())
            .max_by(|a, b| libm::fabs(a.cohens_d.unwrap()).total_cmp(&libm::fabs(b.cohens_d.unwrap())))
    }
}

/// Linear-interpolation quantile (Hyndman–Fan type 7) of sorted data.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = libm::floor(h) as usize;
    match sorted.get(lo + 1) {
        Some(next) => sorted[lo] + (h - lo as f64) * (next - sorted[lo]),
        None => sorted[lo],
    }
}

/// Quartiles, 1.5·IQR whiskers (drawn to the most extreme point inside the
/// fences) and the points beyond them.
pub fn box_plot(feature: &str, group: Group, values: &[f64]) -> Result<BoxPlot> {
    if values.is_empty() {
        return Err(Error::EmptyGroup(group.as_str()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q1 = quantile_sorted(&sorted, 0.25);
    let median = quantile_sorted(&sorted, 0.5);
    let q3 = quantile_sorted(&sorted, 0.75);
    let iqr = q3 - q1;
    let (lo_fence, hi_fence) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let inside = || sorted.iter().copied().filter(|v| (lo_fence..=hi_fence).contains(v));
    let lo_whisker = inside().next().unwrap_or(q1);
    let hi_whisker = inside().next_back().unwrap_or(q3);
    let outliers = sorted.iter().copied().filter(|v| !(lo_fence..=hi_fence).contains(v)).collect();
    Ok(BoxPlot { feature: feature.into(), group, q1, median, q3, lo_whisker, hi_whisker, outliers })
}

fn group_values(samples: &[CohortSample], group: Group, feature: &str) -> Vec<f64> {
    samples.iter().filter(|s| s.group == group).filter_map(|s| s.feature(feature)).collect()
}

/// Per-feature test, effect size and box-plot cells for both groups.
pub fn run_cohort_analysis(samples: &[CohortSample]) -> Result<(CohortStats, Vec<BoxPlot>)> {
    let n_expert = samples.iter().filter(|s| s.group == Group::Expert).count();
    let n_beginner = samples.len() - n_expert;
    if n_expert == 0 {
        return Err(Error::EmptyGroup("expert"));
    }
    if n_beginner == 0 {
        return Err(Error::EmptyGroup("beginner"));
    }
    if samples.iter().any(|s| COHORT_FEATURES.iter().any(|f| !s.feature(f).unwrap().is_finite())) {
        return Err(Error::DegenerateSample("non-finite cohort value"));
    }
    if n_expert < 2 || n_beginner < 2 {
        return Err(Error::DegenerateSample("each group needs at least two samples"));
    }

    let mut features = Vec::new();
    let mut plots = Vec::new();
    let mut warnings = Vec::new();
    for feature in COHORT_FEATURES {
        let a = group_values(samples, Group::Expert, feature);
        let b = group_values(samples, Group::Beginner, feature);
        let choice = choose_test(&a, &b);
        if let Some(w) = &choice.warning {
            warnings.push(format!("{feature}: {w}"));
        }
        let mut test_used = choice.test;
        let result = match test_used {
            TestKind::WelchT => welch_t(&a, &b),
            TestKind::MannWhitneyU => mann_whitney_u(&a, &b),
        };
        let result = match result {
            Ok(r) => r,
            Err(e) => {
                warnings.push(format!("{feature}: {e}; using mann-whitney-u"));
                test_used = TestKind::MannWhitneyU;
                mann_whitney_u(&a, &b)?
            }
        };
        let cohens_d = match cohens_d(&a, &b) {
            Ok(d) => Some(d),
            Err(e) => {
                warnings.push(format!("{feature}: cohen's d unavailable ({e})"));
                None
            }
        };
        features.push(FeatureComparison {
            feature: feature.into(),
            test_used,
            statistic: result.statistic,
            p_value: result.p_value,
            cohens_d,
            n_expert: a.len(),
            n_beginner: b.len(),
            normality_p_expert: choice.normality_p[0],
            normality_p_beginner: choice.normality_p[1],
        });
        plots.push(box_plot(feature, Group::Expert, &a)?);
        plots.push(box_plot(feature, Group::Beginner, &b)?);
    }
    Ok((CohortStats { n_expert, n_beginner, features, warnings }, plots))
}

/// Series placed on a common grid of offsets relative to impact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignedSeries {
    /// Frame offset from impact for each column.
    pub offsets: Vec<i64>,
    /// One row per input series; `None` where the series has no sample.
    pub rows: Vec<Vec<Option<f64>>>,
}

/// Unwraps each rotation series and shifts it so its impact frame lands on
/// offset 0. Impact frames are absolute frame numbers.
pub fn align_and_unwrap(series: &[TimeSeries], impact_frames: &[usize]) -> Result<AlignedSeries> {
    if series.len() != impact_frames.len() {
        return Err(Error::LengthMismatch { expected: series.len(), found: impact_frames.len() });
    }
    let mut spans = Vec::with_capacity(series.len());
    for (i, (s, &frame)) in series.iter().zip(impact_frames).enumerate() {
        let idx = frame
            .checked_sub(s.start_frame)
            .filter(|&idx| idx < s.len())
            .ok_or(Error::ImpactOutOfRange { series: i, frame, len: s.len() })?;
        spans.push((idx as i64, s.len() as i64 - idx as i64));
    }
    let before = spans.iter().map(|(b, _)| *b).max().unwrap_or(0);
    let after = spans.iter().map(|(_, a)| *a).max().unwrap_or(0);
    let offsets: Vec<i64> = (-before..after).collect();
    let rows = series
        .iter()
        .zip(&spans)
        .map(|(s, &(idx, _))| {
            let unwrapped = unwrap_angles(&s.values);
            offsets
                .iter()
                .map(|&o| usize::try_from(idx + o).ok().and_then(|k| unwrapped.get(k).copied()))
                .collect()
        })
        .collect();
    Ok(AlignedSeries { offsets, rows })
}
