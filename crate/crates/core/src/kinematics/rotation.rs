use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};
use serde::{Deserialize, Serialize};

use super::angles::{unwrap_with_gaps, MIN_SEGMENT_LENGTH};
use super::{central_difference, TimeSeries};
use crate::error::{Error, Result};
use crate::joints::CanonicalJoint;
use crate::skeleton::SkeletonSequence;
use crate::vec3::Vec3;

/// Vertical axis of the capture volume. The ground plane is spanned by the
/// other two axes, taken in cyclic order (z up → (x, y)).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UpAxis {
    X,
    Y,
    #[default]
    Z,
}

impl UpAxis {
    fn ground(self, v: Vec3) -> (f64, f64) {
        match self {
            UpAxis::Z => (v.x(), v.y()),
            UpAxis::X => (v.y(), v.z()),
            UpAxis::Y => (v.z(), v.x()),
        }
    }
}

impl core::str::FromStr for UpAxis {
    type Err = ();

    fn from_str(s: &str) -> core::result::Result<Self, ()> {
        match s {
            "x" | "X" => Ok(UpAxis::X),
            "y" | "Y" => Ok(UpAxis::Y),
            "z" | "Z" => Ok(UpAxis::Z),
            _ => Err(()),
        }
    }
}

/// `atan2` of the ground-plane projection, or `None` if the projection is
/// shorter than [`MIN_SEGMENT_LENGTH`].
pub fn ground_heading(v: Vec3, up: UpAxis) -> Option<f64> {
    let (a, b) = up.ground(v);
    if libm::hypot(a, b) < MIN_SEGMENT_LENGTH {
        return None;
    }
    Some(libm::atan2(b, a))
}

/// Removes 2π jumps so successive differences lie in (−π, π].
///
/// Each output is the input plus an accumulated multiple of 2π, so re-wrapping
/// returns the original samples.
pub fn unwrap_angles(values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut offset = 0.0;
    for (i, &v) in values.iter().enumerate() {
        if i > 0 {
            // smallest k with step - 2πk in (−π, π]
            let step = v - values[i - 1];
            let k = libm::ceil((step - PI) / TAU);
            offset -= k * TAU;
        }
        out.push(v + offset);
    }
    out
}

/// Trunk rotation θ(t): heading of the left→right shoulder vector in the
/// ground plane, unwrapped. Frames where the shoulders coincide in projection
/// are interpolated.
pub fn trunk_rotation(seq: &SkeletonSequence, up: UpAxis) -> Result<TimeSeries> {
    let left = seq
        .trajectory(CanonicalJoint::LeftShoulder)
        .ok_or(Error::MissingJoint("left_shoulder"))?;
    let right = seq
        .trajectory(CanonicalJoint::RightShoulder)
        .ok_or(Error::MissingJoint("right_shoulder"))?;
    let raw: Vec<Option<f64>> = left.iter().zip(&right).map(|(l, r)| ground_heading(*r - *l, up)).collect();
    let values = unwrap_with_gaps(&raw).ok_or(Error::DegenerateGeometry)?;
    Ok(TimeSeries::new(values, seq.dt()))
}

/// ω(t) = dθ/dt by central difference; starts one frame after θ.
pub fn trunk_angular_velocity(theta: &TimeSeries) -> Result<TimeSeries> {
    let values = central_difference(&theta.values, theta.dt)?;
    Ok(TimeSeries::starting_at(values, theta.dt, theta.start_frame + 1))
}
