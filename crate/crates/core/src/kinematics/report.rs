use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::angles::tennis_joint_angles;
use super::racket::{kinetic_chain_timing, kinetic_energy, peak_power, racket_dynamics};
use super::rotation::{trunk_angular_velocity, trunk_rotation, UpAxis};
use super::{central_velocity, segment_phases, Phases, TimeSeries};
use crate::error::Result;
use crate::joints::{CanonicalJoint, Limb, Side};
use crate::skeleton::{validate_sequence, SkeletonSequence, ValidationMetrics};
use crate::vec3::Vec3;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FeatureConfig {
    pub up_axis: UpAxis,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl SummaryStats {
    pub fn of(values: &[f64]) -> Option<SummaryStats> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        // clamp guards the last ulp of rounding in the sum
        let mean = (values.iter().sum::<f64>() / n).clamp(min, max);
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Some(SummaryStats { mean, std: libm::sqrt(var), min, max })
    }
}

/// Upstream classifier output, accepted as an alternative stroke label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub source_id: String,
    pub frames: usize,
    pub joints: usize,
    pub sample_rate_hz: f64,
    pub up_axis: UpAxis,
    pub available_joints: Vec<String>,
    pub end_effector: CanonicalJoint,
    pub proxy_marker: bool,
    /// Sub-features that could not be computed, with the reason.
    pub omitted: Vec<String>,
}

/// Per-stroke features. Scalar keys are the fixed external names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureReport {
    pub predicted_stroke: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classification: Option<Classification>,
    pub racket_velocity_max: f64,
    pub peak_power: Option<f64>,
    pub rotation_range_deg: Option<f64>,
    pub stroke_duration_frames: usize,
    pub stroke_duration_s: f64,
    pub peak_angular_velocity: Option<f64>,
    pub impact_timing_pct: Option<f64>,
    pub kinetic_chain_pct: f64,
    pub impact_frame: Option<usize>,
    pub peak_acceleration: Option<f64>,
    pub phases: Phases,
    pub racket_speed: TimeSeries,
    pub racket_acceleration: Option<TimeSeries>,
    pub kinetic_energy: TimeSeries,
    pub trunk_rotation: Option<TimeSeries>,
    pub trunk_angular_velocity: Option<TimeSeries>,
    pub joint_angles: BTreeMap<String, TimeSeries>,
    pub segment_speeds: BTreeMap<String, TimeSeries>,
    pub summary_stats: BTreeMap<String, SummaryStats>,
    pub validation: ValidationMetrics,
    pub metadata: Metadata,
}

/// Scalar feature keys in their fixed reporting order.
pub const SCALAR_KEYS: [&str; 8] = [
    "racket_velocity_max",
    "peak_power",
    "rotation_range_deg",
    "stroke_duration_frames",
    "stroke_duration_s",
    "peak_angular_velocity",
    "impact_timing_pct",
    "kinetic_chain_pct",
];

impl FeatureReport {
    /// The stroke label: `predicted_stroke`, else `classification.label`, else
    /// `"UNKNOWN"`.
    pub fn stroke_label(&self) -> &str {
        self.predicted_stroke
            .as_deref()
            .filter(|s| !s.trim().is_empty())
            .or_else(|| self.classification.as_ref().map(|c| c.label.as_str()).filter(|s| !s.trim().is_empty()))
            .unwrap_or("UNKNOWN")
    }

    /// Scalar features in [`SCALAR_KEYS`] order.
    pub fn scalars(&self) -> [(&'static str, Option<f64>); 8] {
        [
            ("racket_velocity_max", Some(self.racket_velocity_max)),
            ("peak_power", self.peak_power),
            ("rotation_range_deg", self.rotation_range_deg),
            ("stroke_duration_frames", Some(self.stroke_duration_frames as f64)),
            ("stroke_duration_s", Some(self.stroke_duration_s)),
            ("peak_angular_velocity", self.peak_angular_velocity),
            ("impact_timing_pct", self.impact_timing_pct),
            ("kinetic_chain_pct", Some(self.kinetic_chain_pct)),
        ]
    }
}

fn midpoint_speed(seq: &SkeletonSequence, a: CanonicalJoint, b: CanonicalJoint) -> Option<TimeSeries> {
    let pa = seq.trajectory(a)?;
    let pb = seq.trajectory(b)?;
    let mid: Vec<Vec3> = pa.iter().zip(&pb).map(|(a, b)| (*a + *b) * 0.5).collect();
    joint_speed(&mid, seq.dt())
}

fn joint_speed(path: &[Vec3], dt: f64) -> Option<TimeSeries> {
    let v = central_velocity(path, dt).ok()?;
    Some(TimeSeries::starting_at(v.iter().map(|v| v.norm()).collect(), dt, 1))
}

/// Segment speeds: hand, forearm, upper arm, thigh and shank per side, each
/// taken at the segment midpoint (the hand at the hand joint).
fn segment_speeds(seq: &SkeletonSequence, omitted: &mut Vec<String>) -> BTreeMap<String, TimeSeries> {
    let mut out = BTreeMap::new();
    for (side, prefix) in [(Side::Left, "left"), (Side::Right, "right")] {
        let j = |l| CanonicalJoint::sided(l, side).unwrap();
        let segments = [
            ("upper_arm", j(Limb::Shoulder), j(Limb::Elbow)),
            ("forearm", j(Limb::Elbow), j(Limb::Wrist)),
            ("hand", j(Limb::Hand), j(Limb::Hand)),
            ("thigh", j(Limb::Hip), j(Limb::Knee)),
            ("shank", j(Limb::Knee), j(Limb::Ankle)),
        ];
        for (name, a, b) in segments {
            let key = format!("{prefix}_{name}");
            match midpoint_speed(seq, a, b) {
                Some(s) => {
                    out.insert(key, s);
                }
                None => omitted.push(format!("segment {key}: joint missing")),
            }
        }
    }
    out
}

/// Runs every extractor over `seq` and assembles the report.
///
/// Only a missing end effector is fatal; other unavailable sub-features are
/// listed in `metadata.omitted`.
pub fn build_feature_report(
    seq: &SkeletonSequence,
    predicted_stroke: Option<&str>,
    config: &FeatureConfig,
) -> Result<FeatureReport> {
    let frames = seq.frames();
    let mut omitted = Vec::new();

    let racket = racket_dynamics(seq)?;
    let energy = kinetic_energy(&racket.speed);
    let peak_power = match peak_power(&energy) {
        Ok(p) => Some(p),
        Err(e) => {
            omitted.push(format!("peak_power: {e}"));
            None
        }
    };
    if racket.impact_frame.is_none() {
        omitted.push("impact_timing_pct: needs at least 5 frames".to_string());
    }

    let (theta, omega) = match trunk_rotation(seq, config.up_axis) {
        Ok(theta) => {
            let omega = match trunk_angular_velocity(&theta) {
                Ok(w) => Some(w),
                Err(e) => {
                    omitted.push(format!("trunk_angular_velocity: {e}"));
                    None
                }
            };
            (Some(theta), omega)
        }
        Err(e) => {
            omitted.push(format!("trunk_rotation: {e}"));
            (None, None)
        }
    };
    let rotation_range_deg = theta
        .as_ref()
        .and_then(|t| Some((t.max()? - t.min()?).to_degrees()));
    let peak_angular_velocity = omega
        .as_ref()
        .and_then(|w| w.values.iter().map(|v| v.abs()).reduce(f64::max));

    let angles = tennis_joint_angles(seq, config.up_axis);
    omitted.extend(angles.omitted);
    let mut segments = segment_speeds(seq, &mut omitted);
    segments.insert("racket".to_string(), racket.speed.clone());

    let phases = segment_phases(frames)?;
    let kinetic_chain_pct = kinetic_chain_timing(&racket.speed, frames).unwrap_or(0.0);

    let mut summary_stats = BTreeMap::new();
    let mut add = |name: String, series: &TimeSeries| {
        if let Some(s) = SummaryStats::of(&series.values) {
            summary_stats.insert(name, s);
        }
    };
    add("racket_speed".to_string(), &racket.speed);
    add("kinetic_energy".to_string(), &energy);
    if let Some(a) = &racket.acceleration {
        add("racket_acceleration".to_string(), a);
    }
    if let Some(t) = &theta {
        add("trunk_rotation".to_string(), t);
    }
    if let Some(w) = &omega {
        add("trunk_angular_velocity".to_string(), w);
    }
    for (name, series) in &angles.angles {
        add(format!("joint_angle.{name}"), series);
    }
    for (name, series) in &segments {
        add(format!("segment_speed.{name}"), series);
    }

    let validation = validate_sequence(seq);
    let metadata = Metadata {
        source_id: seq.source_id().to_string(),
        frames,
        joints: seq.joints().len(),
        sample_rate_hz: seq.sample_rate_hz(),
        up_axis: config.up_axis,
        available_joints: validation.available_joints.clone(),
        end_effector: racket.marker,
        proxy_marker: racket.proxy,
        omitted,
    };

    Ok(FeatureReport {
        predicted_stroke: predicted_stroke.map(str::to_string),
        classification: None,
        racket_velocity_max: racket.max_speed,
        peak_power,
        rotation_range_deg,
        stroke_duration_frames: frames,
        stroke_duration_s: frames as f64 / seq.sample_rate_hz(),
        peak_angular_velocity,
        impact_timing_pct: racket.impact_timing_pct,
        kinetic_chain_pct,
        impact_frame: racket.impact_frame,
        peak_acceleration: racket.peak_accel_mag,
        phases,
        racket_speed: racket.speed,
        racket_acceleration: racket.acceleration,
        kinetic_energy: energy,
        trunk_rotation: theta,
        trunk_angular_velocity: omega,
        joint_angles: angles.angles,
        segment_speeds: segments,
        summary_stats,
        validation,
        metadata,
    })
}
