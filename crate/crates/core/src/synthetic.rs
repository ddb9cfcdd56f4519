//! A scripted forehand-like stroke with all 21 joints, for fixtures and demos.
//! Coordinates are metres with z up.

use alloc::vec::Vec;

use crate::error::Result;
use crate::joints::CanonicalJoint;
use crate::skeleton::SkeletonSequence;
use crate::vec3::Vec3;

fn smoothstep(t: f64) -> f64 {
    t * t * (3.0 - 2.0 * t)
}

fn heading(angle: f64, drop: f64) -> Vec3 {
    Vec3::new(libm::cos(angle), libm::sin(angle), drop)
}

/// Joint positions at normalized time `t ∈ [0, 1]`, in [`CanonicalJoint::ALL`] order.
pub fn pose(t: f64) -> Vec<Vec3> {
    let s = smoothstep(t);
    let trunk = -1.2 + 2.4 * s;
    let hips = 0.6 * trunk;
    let swing = -2.0 + 3.5 * s;
    let knee_bend = 0.12 * libm::sin(core::f64::consts::PI * t);

    let across = |angle: f64| Vec3::new(-libm::sin(angle), libm::cos(angle), 0.0);
    let pelvis = Vec3::new(0.05 * s, 0.0, 1.0 - 0.5 * knee_bend);
    let shoulder_mid = pelvis + Vec3::new(0.0, 0.0, 0.45);
    let l_sh = shoulder_mid - across(trunk) * 0.2;
    let r_sh = shoulder_mid + across(trunk) * 0.2;
    let l_hip = pelvis - across(hips) * 0.15;
    let r_hip = pelvis + across(hips) * 0.15;

    let r_elbow = r_sh + heading(trunk + swing, -0.35) * 0.28;
    let r_wrist = r_elbow + heading(trunk + 1.3 * swing, -0.1) * 0.27;
    let r_hand = r_wrist + heading(trunk + 1.4 * swing, 0.05) * 0.08;
    let racket = r_hand + heading(trunk + 1.6 * swing, 0.15) * 0.6;

    let guide = 0.8 - 0.6 * s;
    let l_elbow = l_sh + heading(trunk + 1.4 + guide, -0.6) * 0.27;
    let l_wrist = l_elbow + heading(trunk + 1.0 + guide, -0.2) * 0.26;
    let l_hand = l_wrist + heading(trunk + 1.0 + guide, 0.0) * 0.08;

    let leg = |hip: Vec3, bend: f64| {
        let knee = hip + Vec3::new(bend, 0.0, -0.44);
        let ankle = Vec3::new(hip.x(), hip.y(), 0.08);
        let foot = ankle + Vec3::new(0.12, 0.0, -0.06);
        (knee, ankle, foot)
    };
    let (l_knee, l_ankle, l_foot) = leg(l_hip, 0.18 * knee_bend + 0.03);
    let (r_knee, r_ankle, r_foot) = leg(r_hip, 0.25 * knee_bend + 0.02);

    CanonicalJoint::ALL
        .iter()
        .map(|j| match j {
            CanonicalJoint::Head => shoulder_mid + Vec3::new(0.0, 0.0, 0.22),
            CanonicalJoint::Neck => shoulder_mid + Vec3::new(0.0, 0.0, 0.06),
            CanonicalJoint::Spine => pelvis + Vec3::new(0.0, 0.0, 0.22),
            CanonicalJoint::Pelvis => pelvis,
            CanonicalJoint::LeftShoulder => l_sh,
            CanonicalJoint::LeftElbow => l_elbow,
            CanonicalJoint::LeftWrist => l_wrist,
            CanonicalJoint::LeftHand => l_hand,
            CanonicalJoint::LeftHip => l_hip,
            CanonicalJoint::LeftKnee => l_knee,
            CanonicalJoint::LeftAnkle => l_ankle,
            CanonicalJoint::LeftFoot => l_foot,
            CanonicalJoint::RightShoulder => r_sh,
            CanonicalJoint::RightElbow => r_elbow,
            CanonicalJoint::RightWrist => r_wrist,
            CanonicalJoint::RightHand => r_hand,
            CanonicalJoint::RightHip => r_hip,
            CanonicalJoint::RightKnee => r_knee,
            CanonicalJoint::RightAnkle => r_ankle,
            CanonicalJoint::RightFoot => r_foot,
            CanonicalJoint::RacketTip => racket,
        })
        .collect()
}

/// `frames` evenly spaced poses from [`pose`].
pub fn scripted_stroke(frames: usize, sample_rate_hz: f64) -> Result<SkeletonSequence> {
    let last = frames.saturating_sub(1).max(1) as f64;
    let poses = (0..frames).map(|i| pose(i as f64 / last)).collect();
    SkeletonSequence::from_frames(CanonicalJoint::ALL.to_vec(), poses, sample_rate_hz, "synthetic_forehand")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::{build_feature_report, FeatureConfig};

    #[test]
    fn stroke_has_every_joint_and_a_full_report() {
        let seq = scripted_stroke(90, 60.0).unwrap();
        assert_eq!(seq.joints().len(), 21);
        let report = build_feature_report(&seq, Some("forehand_flat"), &FeatureConfig::default()).unwrap();
        assert!(report.metadata.omitted.is_empty(), "{:?}", report.metadata.omitted);
        assert!(report.racket_velocity_max > 1.0);
        let range = report.rotation_range_deg.unwrap();
        assert!((range - 2.4f64.to_degrees()).abs() < 1e-6, "{range}");
    }
}
