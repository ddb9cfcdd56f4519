//! Raw observation tables and the gap-free [`SkeletonSequence`].

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::joints::CanonicalJoint;
use crate::vec3::Vec3;

pub use crate::joints::{map_joints, MappedTable};

pub const DEFAULT_SAMPLE_RATE_HZ: f64 = 60.0;

/// One (frame, joint) observation. `valid == false` marks a missing cell.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRow {
    pub frame: i64,
    pub joint: String,
    pub position: Vec3,
    pub valid: bool,
}

/// Long-form observations as read from a motion file.
#[derive(Debug, Clone, PartialEq)]
pub struct RawMotionTable {
    pub rows: Vec<RawRow>,
    pub sample_rate_hz: f64,
    pub source_id: String,
}

impl RawMotionTable {
    /// Builds a table and checks its invariants: positive rate, non-negative
    /// frames, unique (frame, joint) pairs and at least three distinct frames.
    pub fn new(rows: Vec<RawRow>, sample_rate_hz: f64, source_id: impl Into<String>) -> Result<Self> {
        let table = RawMotionTable { rows, sample_rate_hz, source_id: source_id.into() };
        table.check()?;
        Ok(table)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz > 0.0) {
            return Err(Error::InvalidSampleRate(self.sample_rate_hz));
        }
        if self.rows.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut seen = BTreeSet::new();
        for row in &self.rows {
            if row.frame < 0 {
                return Err(Error::InvalidFrame(row.frame));
            }
            if !seen.insert((row.frame, row.joint.as_str())) {
                return Err(Error::DuplicateObservation { frame: row.frame, joint: row.joint.clone() });
            }
        }
        let frames = self.distinct_frames();
        if frames < 3 {
            return Err(Error::InsufficientFrames { required: 3, available: frames });
        }
        Ok(())
    }

    pub fn distinct_frames(&self) -> usize {
        self.rows.iter().map(|r| r.frame).collect::<BTreeSet<_>>().len()
    }
}

/// Gap-free joint trajectories, frame-major.
///
/// Frames cover the contiguous range from the first to the last frame index of
/// the source table, rebased to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkeletonSequence {
    joints: Vec<CanonicalJoint>,
    frames: usize,
    positions: Vec<Vec3>,
    imputed: Vec<bool>,
    sample_rate_hz: f64,
    source_id: String,
}

impl SkeletonSequence {
    /// Builds a sequence from complete per-frame positions (`frames[t][j]`
    /// belongs to `joints[j]`). Nothing is marked as imputed.
    pub fn from_frames(
        joints: Vec<CanonicalJoint>,
        frames: Vec<Vec<Vec3>>,
        sample_rate_hz: f64,
        source_id: impl Into<String>,
    ) -> Result<Self> {
        if !(sample_rate_hz.is_finite() && sample_rate_hz > 0.0) {
            return Err(Error::InvalidSampleRate(sample_rate_hz));
        }
        if frames.len() < 3 {
            return Err(Error::InsufficientFrames { required: 3, available: frames.len() });
        }
        let unique: BTreeSet<_> = joints.iter().collect();
        if unique.len() != joints.len() {
            return Err(Error::DuplicateObservation { frame: 0, joint: "joint list".to_string() });
        }
        let mut positions = Vec::with_capacity(frames.len() * joints.len());
        for (t, frame) in frames.iter().enumerate() {
            if frame.len() != joints.len() {
                return Err(Error::LengthMismatch { expected: joints.len(), found: frame.len() });
            }
            for p in frame {
                if !p.is_finite() {
                    return Err(Error::Imputation { joint: alloc::format!("frame {t}"), valid_frames: 0 });
                }
                positions.push(*p);
            }
        }
        let n = positions.len();
        Ok(SkeletonSequence {
            joints,
            frames: frames.len(),
            positions,
            imputed: vec![false; n],
            sample_rate_hz,
            source_id: source_id.into(),
        })
    }

    pub fn joints(&self) -> &[CanonicalJoint] {
        &self.joints
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.sample_rate_hz
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn has(&self, joint: CanonicalJoint) -> bool {
        self.joints.contains(&joint)
    }

    fn index_of(&self, joint: CanonicalJoint) -> Option<usize> {
        self.joints.iter().position(|j| *j == joint)
    }

    pub fn position(&self, frame: usize, joint: CanonicalJoint) -> Option<Vec3> {
        let j = self.index_of(joint)?;
        self.positions.get(frame * self.joints.len() + j).copied()
    }

    /// Position of `joint` in every frame.
    pub fn trajectory(&self, joint: CanonicalJoint) -> Option<Vec<Vec3>> {
        let j = self.index_of(joint)?;
        let stride = self.joints.len();
        Some((0..self.frames).map(|t| self.positions[t * stride + j]).collect())
    }

    pub fn was_imputed(&self, frame: usize, joint: CanonicalJoint) -> Option<bool> {
        let j = self.index_of(joint)?;
        self.imputed.get(frame * self.joints.len() + j).copied()
    }

    /// Returns a copy with every coordinate multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> SkeletonSequence {
        SkeletonSequence {
            positions: self.positions.iter().map(|p| *p * factor).collect(),
            ..self.clone()
        }
    }

    /// Applies `f` to every position.
    pub fn map_positions(&self, f: impl Fn(Vec3) -> Vec3) -> SkeletonSequence {
        SkeletonSequence { positions: self.positions.iter().map(|p| f(*p)).collect(), ..self.clone() }
    }

    /// Long-form table with every observation valid.
    pub fn to_table(&self) -> RawMotionTable {
        let mut rows = Vec::with_capacity(self.positions.len());
        for t in 0..self.frames {
            for (j, joint) in self.joints.iter().enumerate() {
                rows.push(RawRow {
                    frame: t as i64,
                    joint: joint.name().to_string(),
                    position: self.positions[t * self.joints.len() + j],
                    valid: true,
                });
            }
        }
        RawMotionTable { rows, sample_rate_hz: self.sample_rate_hz, source_id: self.source_id.clone() }
    }
}

/// Fills gaps: interior gaps by per-coordinate linear interpolation between
/// the bracketing valid frames, leading/trailing gaps by holding the nearest
/// valid value. Joint names must already be canonical (see [`map_joints`]).
pub fn impute_gaps(table: &RawMotionTable) -> Result<SkeletonSequence> {
    table.check()?;
    let first = table.rows.iter().map(|r| r.frame).min().ok_or(Error::EmptyInput)?;
    let last = table.rows.iter().map(|r| r.frame).max().ok_or(Error::EmptyInput)?;
    let frames = (last - first + 1) as usize;

    let mut per_joint: BTreeMap<CanonicalJoint, Vec<Option<Vec3>>> = BTreeMap::new();
    for row in &table.rows {
        let joint = CanonicalJoint::from_name(&row.joint)
            .ok_or_else(|| Error::UnknownJoint(row.joint.clone()))?;
        let slots = per_joint.entry(joint).or_insert_with(|| vec![None; frames]);
        if row.valid && row.position.is_finite() {
            slots[(row.frame - first) as usize] = Some(row.position);
        }
    }

    let joints: Vec<CanonicalJoint> = per_joint.keys().copied().collect();
    let mut columns = Vec::with_capacity(joints.len());
    for (joint, slots) in &per_joint {
        let valid = slots.iter().filter(|s| s.is_some()).count();
        if valid < 2 {
            return Err(Error::Imputation { joint: joint.name().to_string(), valid_frames: valid });
        }
        let imputed: Vec<bool> = slots.iter().map(Option::is_none).collect();
        let filled = fill_gaps(slots, |a, b, t| a.lerp(b, t)).expect("two valid frames checked above");
        columns.push((filled, imputed));
    }

    let mut positions = Vec::with_capacity(frames * joints.len());
    let mut imputed = Vec::with_capacity(frames * joints.len());
    for t in 0..frames {
        for (filled, mask) in &columns {
            positions.push(filled[t]);
            imputed.push(mask[t]);
        }
    }

    Ok(SkeletonSequence {
        joints,
        frames,
        positions,
        imputed,
        sample_rate_hz: table.sample_rate_hz,
        source_id: table.source_id.clone(),
    })
}

/// Fills `None` slots: linear between valid neighbours, nearest value at the
/// edges. Returns `None` when no slot is valid.
pub fn fill_gaps<T: Copy>(slots: &[Option<T>], lerp: impl Fn(T, T, f64) -> T) -> Option<Vec<T>> {
    let valid: Vec<usize> = (0..slots.len()).filter(|&i| slots[i].is_some()).collect();
    let (&first, &last) = (valid.first()?, valid.last()?);
    let mut out = Vec::with_capacity(slots.len());
    let mut next = 0; // index into `valid` of the first valid frame >= t
    for t in 0..slots.len() {
        let value = match slots[t] {
            Some(v) => v,
            None if t < first => slots[first].unwrap(),
            None if t > last => slots[last].unwrap(),
            None => {
                while valid[next] < t {
                    next += 1;
                }
                let (lo, hi) = (valid[next - 1], valid[next]);
                let frac = (t - lo) as f64 / (hi - lo) as f64;
                lerp(slots[lo].unwrap(), slots[hi].unwrap(), frac)
            }
        };
        out.push(value);
    }
    Some(out)
}

/// Data-quality summary of a sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationMetrics {
    pub frame_count: usize,
    pub joint_count: usize,
    /// Fraction of frames filled by imputation, per joint.
    pub imputed_fraction: BTreeMap<String, f64>,
    pub available_joints: Vec<String>,
    pub unavailable_joints: Vec<String>,
    /// Fraction of the canonical vocabulary present.
    pub joint_coverage: f64,
}

pub fn validate_sequence(seq: &SkeletonSequence) -> ValidationMetrics {
    let mut imputed_fraction = BTreeMap::new();
    for &joint in seq.joints() {
        let count = (0..seq.frames()).filter(|&t| seq.was_imputed(t, joint) == Some(true)).count();
        imputed_fraction.insert(joint.name().to_string(), count as f64 / seq.frames() as f64);
    }
    let available_joints: Vec<String> = seq.joints().iter().map(|j| j.name().to_string()).collect();
    let unavailable_joints = CanonicalJoint::ALL
        .iter()
        .filter(|j| !seq.has(**j))
        .map(|j| j.name().to_string())
        .collect();
    ValidationMetrics {
        frame_count: seq.frames(),
        joint_count: seq.joints().len(),
        imputed_fraction,
        joint_coverage: seq.joints().len() as f64 / CanonicalJoint::ALL.len() as f64,
        available_joints,
        unavailable_joints,
    }
}
