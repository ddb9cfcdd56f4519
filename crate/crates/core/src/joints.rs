//! Canonical joint vocabulary and alias resolution.
//!
//! Input skeletons name their joints in many ways (`right_shoulder`,
//! `RShoulder`, `shoulder_r`, `ShoulderRight`). Names are normalized by
//! lowercasing and dropping every non-alphanumeric character, then matched
//! against a closed alias table with an optional side token as prefix or
//! suffix.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::skeleton::{RawMotionTable, RawRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
    Center,
}

/// The 21-joint vocabulary: a Kinect-style 20-joint body plus the racket tip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CanonicalJoint {
    Head,
    Neck,
    Spine,
    Pelvis,
    LeftShoulder,
    LeftElbow,
    LeftWrist,
    LeftHand,
    LeftHip,
    LeftKnee,
    LeftAnkle,
    LeftFoot,
    RightShoulder,
    RightElbow,
    RightWrist,
    RightHand,
    RightHip,
    RightKnee,
    RightAnkle,
    RightFoot,
    RacketTip,
}

/// Joint kinds that exist once per side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Limb {
    Shoulder,
    Elbow,
    Wrist,
    Hand,
    Hip,
    Knee,
    Ankle,
    Foot,
}

impl CanonicalJoint {
    pub const ALL: [CanonicalJoint; 21] = [
        CanonicalJoint::Head,
        CanonicalJoint::Neck,
        CanonicalJoint::Spine,
        CanonicalJoint::Pelvis,
        CanonicalJoint::LeftShoulder,
        CanonicalJoint::LeftElbow,
        CanonicalJoint::LeftWrist,
        CanonicalJoint::LeftHand,
        CanonicalJoint::LeftHip,
        CanonicalJoint::LeftKnee,
        CanonicalJoint::LeftAnkle,
        CanonicalJoint::LeftFoot,
        CanonicalJoint::RightShoulder,
        CanonicalJoint::RightElbow,
        CanonicalJoint::RightWrist,
        CanonicalJoint::RightHand,
        CanonicalJoint::RightHip,
        CanonicalJoint::RightKnee,
        CanonicalJoint::RightAnkle,
        CanonicalJoint::RightFoot,
        CanonicalJoint::RacketTip,
    ];

    pub fn name(self) -> &'static str {
        use CanonicalJoint::*;
        match self {
            Head => "head",
            Neck => "neck",
            Spine => "spine",
            Pelvis => "pelvis",
            LeftShoulder => "left_shoulder",
            LeftElbow => "left_elbow",
            LeftWrist => "left_wrist",
            LeftHand => "left_hand",
            LeftHip => "left_hip",
            LeftKnee => "left_knee",
            LeftAnkle => "left_ankle",
            LeftFoot => "left_foot",
            RightShoulder => "right_shoulder",
            RightElbow => "right_elbow",
            RightWrist => "right_wrist",
            RightHand => "right_hand",
            RightHip => "right_hip",
            RightKnee => "right_knee",
            RightAnkle => "right_ankle",
            RightFoot => "right_foot",
            RacketTip => "racket_tip",
        }
    }

    /// Exact lookup of a canonical name (no alias resolution).
    pub fn from_name(name: &str) -> Option<CanonicalJoint> {
        Self::ALL.iter().copied().find(|j| j.name() == name)
    }

    pub fn side(self) -> Side {
        use CanonicalJoint::*;
        match self {
            LeftShoulder | LeftElbow | LeftWrist | LeftHand | LeftHip | LeftKnee | LeftAnkle
            | LeftFoot => Side::Left,
            RightShoulder | RightElbow | RightWrist | RightHand | RightHip | RightKnee
            | RightAnkle | RightFoot => Side::Right,
            Head | Neck | Spine | Pelvis | RacketTip => Side::Center,
        }
    }

    pub fn sided(limb: Limb, side: Side) -> Option<CanonicalJoint> {
        use CanonicalJoint::*;
        let joint = match (side, limb) {
            (Side::Left, Limb::Shoulder) => LeftShoulder,
            (Side::Left, Limb::Elbow) => LeftElbow,
            (Side::Left, Limb::Wrist) => LeftWrist,
            (Side::Left, Limb::Hand) => LeftHand,
            (Side::Left, Limb::Hip) => LeftHip,
            (Side::Left, Limb::Knee) => LeftKnee,
            (Side::Left, Limb::Ankle) => LeftAnkle,
            (Side::Left, Limb::Foot) => LeftFoot,
            (Side::Right, Limb::Shoulder) => RightShoulder,
            (Side::Right, Limb::Elbow) => RightElbow,
            (Side::Right, Limb::Wrist) => RightWrist,
            (Side::Right, Limb::Hand) => RightHand,
            (Side::Right, Limb::Hip) => RightHip,
            (Side::Right, Limb::Knee) => RightKnee,
            (Side::Right, Limb::Ankle) => RightAnkle,
            (Side::Right, Limb::Foot) => RightFoot,
            (Side::Center, _) => return None,
        };
        Some(joint)
    }
}

impl fmt::Display for CanonicalJoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

const CENTER_ALIASES: &[(&str, CanonicalJoint)] = &[
    ("head", CanonicalJoint::Head),
    ("neck", CanonicalJoint::Neck),
    ("shouldercenter", CanonicalJoint::Neck),
    ("spineshoulder", CanonicalJoint::Neck),
    ("thorax", CanonicalJoint::Neck),
    ("spine", CanonicalJoint::Spine),
    ("spinemid", CanonicalJoint::Spine),
    ("midspine", CanonicalJoint::Spine),
    ("chest", CanonicalJoint::Spine),
    ("torso", CanonicalJoint::Spine),
    ("pelvis", CanonicalJoint::Pelvis),
    ("hipcenter", CanonicalJoint::Pelvis),
    ("spinebase", CanonicalJoint::Pelvis),
    ("midhip", CanonicalJoint::Pelvis),
    ("hips", CanonicalJoint::Pelvis),
    ("root", CanonicalJoint::Pelvis),
    ("rackettip", CanonicalJoint::RacketTip),
    ("racket", CanonicalJoint::RacketTip),
    ("rackethead", CanonicalJoint::RacketTip),
];

const LIMB_ALIASES: &[(&str, Limb)] = &[
    ("shoulder", Limb::Shoulder),
    ("elbow", Limb::Elbow),
    ("wrist", Limb::Wrist),
    ("hand", Limb::Hand),
    ("palm", Limb::Hand),
    ("hip", Limb::Hip),
    ("knee", Limb::Knee),
    ("ankle", Limb::Ankle),
    ("foot", Limb::Foot),
    ("toe", Limb::Foot),
    ("toes", Limb::Foot),
    ("footindex", Limb::Foot),
];

// Longer tokens first so "left..." is not read as "l" + "eft...".
const SIDE_TOKENS: &[(&str, Side)] = &[
    ("left", Side::Left),
    ("right", Side::Right),
    ("l", Side::Left),
    ("r", Side::Right),
];

/// Lowercase and strip separators: `"Right_Shoulder"` becomes `"rightshoulder"`.
pub fn normalize_name(name: &str) -> String {
    name.chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(|c| c.to_lowercase())
        .collect()
}

fn limb_for(base: &str) -> Option<Limb> {
    LIMB_ALIASES.iter().find(|(alias, _)| *alias == base).map(|(_, limb)| *limb)
}

/// Resolves raw joint names to the canonical vocabulary.
///
/// Extra aliases (normalized on insert) take precedence over the built-in
/// table, which is how the vocabulary is extended from configuration.
#[derive(Debug, Clone, Default)]
pub struct JointMapper {
    extra: BTreeMap<String, CanonicalJoint>,
}

impl JointMapper {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_alias(mut self, alias: &str, joint: CanonicalJoint) -> Self {
        self.add_alias(alias, joint);
        self
    }

    pub fn add_alias(&mut self, alias: &str, joint: CanonicalJoint) {
        self.extra.insert(normalize_name(alias), joint);
    }

    pub fn resolve(&self, name: &str) -> Option<CanonicalJoint> {
        let norm = normalize_name(name);
        if norm.is_empty() {
            return None;
        }
        if let Some(joint) = self.extra.get(&norm) {
            return Some(*joint);
        }
        if let Some((_, joint)) = CENTER_ALIASES.iter().find(|(alias, _)| *alias == norm) {
            return Some(*joint);
        }
        for (token, side) in SIDE_TOKENS {
            if let Some(base) = norm.strip_prefix(token) {
                if let Some(limb) = limb_for(base) {
                    return CanonicalJoint::sided(limb, *side);
                }
            }
        }
        for (token, side) in SIDE_TOKENS {
            if let Some(base) = norm.strip_suffix(token) {
                if let Some(limb) = limb_for(base) {
                    return CanonicalJoint::sided(limb, *side);
                }
            }
        }
        None
    }
}

/// Result of [`map_joints`]: the canonicalized table plus dropped names.
#[derive(Debug, Clone)]
pub struct MappedTable {
    pub table: RawMotionTable,
    pub warnings: Vec<String>,
}

/// Rewrites every row's joint name into the canonical vocabulary.
///
/// Unmapped names are dropped (one warning per distinct name). Two different
/// input names landing on the same canonical joint within a frame is an error.
pub fn map_joints(table: &RawMotionTable, mapper: &JointMapper) -> Result<MappedTable> {
    let mut resolved: BTreeMap<String, Option<CanonicalJoint>> = BTreeMap::new();
    for row in &table.rows {
        if !resolved.contains_key(&row.joint) {
            resolved.insert(row.joint.clone(), mapper.resolve(&row.joint));
        }
    }

    let mut warnings = Vec::new();
    for (name, joint) in &resolved {
        if joint.is_none() {
            warnings.push(alloc::format!("dropped unmapped joint '{name}'"));
        }
    }

    // (frame, canonical) -> source name of the first claim
    let mut claimed: BTreeMap<(i64, CanonicalJoint), &str> = BTreeMap::new();
    let mut rows = Vec::with_capacity(table.rows.len());
    for row in &table.rows {
        let Some(joint) = resolved[&row.joint] else {
            continue;
        };
        if let Some(prev) = claimed.insert((row.frame, joint), row.joint.as_str()) {
            if prev == row.joint {
                return Err(Error::DuplicateObservation { frame: row.frame, joint: row.joint.clone() });
            }
            return Err(Error::AmbiguousJoint {
                canonical: joint.name().to_string(),
                first: prev.to_string(),
                second: row.joint.clone(),
                frame: row.frame,
            });
        }
        rows.push(RawRow { joint: joint.name().to_string(), ..row.clone() });
    }

    Ok(MappedTable {
        table: RawMotionTable {
            rows,
            sample_rate_hz: table.sample_rate_hz,
            source_id: table.source_id.clone(),
        },
        warnings,
    })
}
