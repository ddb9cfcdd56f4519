use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::rotation::{ground_heading, unwrap_angles, UpAxis};
use super::TimeSeries;
use crate::error::{Error, Result};
use crate::joints::{CanonicalJoint, Limb, Side};
use crate::skeleton::{fill_gaps, SkeletonSequence};
use crate::vec3::Vec3;

/// Segments shorter than this (meters) have no defined direction.
pub const MIN_SEGMENT_LENGTH: f64 = 1e-9;

/// Angle at vertex `b` between `a - b` and `c - b`, in `[0, π]`.
///
/// Evaluated as `atan2(|u × v|, u · v)`, which stays accurate near 0 and π
/// where `acos` of the clamped cosine loses about half the digits.
pub fn joint_angle(a: Vec3, b: Vec3, c: Vec3) -> Result<f64> {
    let u = a - b;
    let v = c - b;
    if u.norm() < MIN_SEGMENT_LENGTH || v.norm() < MIN_SEGMENT_LENGTH {
        return Err(Error::DegenerateGeometry);
    }
    let cross = u.cross(v).norm();
    let dot = u.dot(v);
    Ok(libm::atan2(cross, dot).clamp(0.0, core::f64::consts::PI))
}

/// Per-frame joint angles keyed `<side>_<joint>_<motion>`, plus the names of
/// angles that could not be computed.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct JointAngles {
    pub angles: BTreeMap<String, TimeSeries>,
    pub omitted: Vec<String>,
}

const THREE_POINT: [(&str, &str, [Limb; 3]); 4] = [
    ("shoulder", "flexion", [Limb::Hip, Limb::Shoulder, Limb::Elbow]),
    ("elbow", "flexion", [Limb::Shoulder, Limb::Elbow, Limb::Wrist]),
    ("wrist", "extension", [Limb::Elbow, Limb::Wrist, Limb::Hand]),
    ("knee", "flexion", [Limb::Hip, Limb::Knee, Limb::Ankle]),
];

/// Shoulder flexion (hip–shoulder–elbow), elbow flexion (shoulder–elbow–wrist),
/// wrist extension (elbow–wrist–hand) and knee flexion (hip–knee–ankle) for
/// each side, plus `center_hip_rotation`: the unwrapped ground-plane heading of
/// the left→right hip line.
///
/// Frames with coincident joints are gaps filled by linear interpolation; an
/// angle whose joints are missing, or which is degenerate in every frame, is
/// listed in `omitted`.
pub fn tennis_joint_angles(seq: &SkeletonSequence, up: UpAxis) -> JointAngles {
    let mut out = JointAngles::default();
    let dt = seq.dt();
    for side in [Side::Left, Side::Right] {
        let side_name = match side {
            Side::Left => "left",
            _ => "right",
        };
        for (joint, motion, limbs) in THREE_POINT {
            let key = format!("{side_name}_{joint}_{motion}");
            let points: Option<Vec<Vec<Vec3>>> = limbs
                .iter()
                .map(|l| CanonicalJoint::sided(*l, side).and_then(|j| seq.trajectory(j)))
                .collect();
            let Some(points) = points else {
                out.omitted.push(format!("{key}: joint missing"));
                continue;
            };
            let slots: Vec<Option<f64>> = (0..seq.frames())
                .map(|t| joint_angle(points[0][t], points[1][t], points[2][t]).ok())
                .collect();
            match fill_gaps(&slots, |a, b, f| a + (b - a) * f) {
                Some(values) => {
                    out.angles.insert(key, TimeSeries::new(values, dt));
                }
                None => out.omitted.push(format!("{key}: degenerate in every frame")),
            }
        }
    }

    let key = "center_hip_rotation";
    match (seq.trajectory(CanonicalJoint::LeftHip), seq.trajectory(CanonicalJoint::RightHip)) {
        (Some(left), Some(right)) => {
            let raw: Vec<Option<f64>> =
                left.iter().zip(&right).map(|(l, r)| ground_heading(*r - *l, up)).collect();
            match unwrap_with_gaps(&raw) {
                Some(values) => {
                    out.angles.insert(key.into(), TimeSeries::new(values, dt));
                }
                None => out.omitted.push(format!("{key}: degenerate in every frame")),
            }
        }
        _ => out.omitted.push(format!("{key}: joint missing")),
    }
    out
}

/// Unwraps the valid samples in order, then linearly fills the gaps.
pub(crate) fn unwrap_with_gaps(raw: &[Option<f64>]) -> Option<Vec<f64>> {
    let valid: Vec<f64> = raw.iter().flatten().copied().collect();
    if valid.is_empty() {
        return None;
    }
    let mut unwrapped = unwrap_angles(&valid).into_iter();
    let slots: Vec<Option<f64>> = raw.iter().map(|v| v.and_then(|_| unwrapped.next())).collect();
    fill_gaps(&slots, |a, b, f| a + (b - a) * f)
}
