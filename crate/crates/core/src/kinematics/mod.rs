//! Kinematic feature extraction: finite differences, joint angles, trunk
//! rotation, racket dynamics, timing and energy.

mod angles;
mod racket;
mod report;
mod rotation;

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vec3::Vec3;

pub use angles::{joint_angle, tennis_joint_angles, JointAngles, MIN_SEGMENT_LENGTH};
pub use racket::{kinetic_chain_timing, kinetic_energy, peak_power, racket_dynamics, RacketDynamics};
pub use report::{build_feature_report, Classification, FeatureConfig, FeatureReport, Metadata, SummaryStats, SCALAR_KEYS};
pub use rotation::{ground_heading, trunk_angular_velocity, trunk_rotation, unwrap_angles, UpAxis};

/// A sampled scalar series. `values[i]` belongs to frame `start_frame + i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub values: Vec<f64>,
    pub dt: f64,
    #[serde(default)]
    pub start_frame: usize,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>, dt: f64) -> Self {
        TimeSeries { values, dt, start_frame: 0 }
    }

    pub fn starting_at(values: Vec<f64>, dt: f64, start_frame: usize) -> Self {
        TimeSeries { values, dt, start_frame }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> Option<f64> {
        self.values.iter().copied().reduce(f64::max)
    }

    pub fn min(&self) -> Option<f64> {
        self.values.iter().copied().reduce(f64::min)
    }

    /// Frame index of the largest value; the earliest frame wins ties.
    pub fn argmax_frame(&self) -> Option<usize> {
        argmax(&self.values).map(|i| i + self.start_frame)
    }
}

/// Index of the maximum, earliest on ties. NaNs never win.
pub(crate) fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            Some((_, b)) if !(v > b) => {}
            _ if v.is_nan() => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
}

/// Central difference `(x[t+1] - x[t-1]) / 2dt` over interior samples.
/// The result has `len - 2` entries, for frames `1..len-1`.
pub fn central_difference(values: &[f64], dt: f64) -> Result<Vec<f64>> {
    if values.len() < 3 {
        return Err(Error::InsufficientFrames { required: 3, available: values.len() });
    }
    let h = 2.0 * dt;
    Ok(values.windows(3).map(|w| (w[2] - w[0]) / h).collect())
}

/// Velocity `v(t) = [p(t+1) - p(t-1)] / 2dt` for frames `1..T-1`.
pub fn central_velocity(positions: &[Vec3], dt: f64) -> Result<Vec<Vec3>> {
    if positions.len() < 3 {
        return Err(Error::InsufficientFrames { required: 3, available: positions.len() });
    }
    let h = 2.0 * dt;
    Ok(positions.windows(3).map(|w| (w[2] - w[0]) / h).collect())
}

/// Central difference of the central velocity: frames `2..T-2`, `T - 4` values.
pub fn central_acceleration(positions: &[Vec3], dt: f64) -> Result<Vec<Vec3>> {
    if positions.len() < 5 {
        return Err(Error::InsufficientFrames { required: 5, available: positions.len() });
    }
    let velocity = central_velocity(positions, dt)?;
    central_velocity(&velocity, dt)
}

/// The three temporal thirds of a stroke as half-open frame ranges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Phases {
    pub preparation: [usize; 2],
    pub execution: [usize; 2],
    pub follow_through: [usize; 2],
}

impl Phases {
    pub fn as_ranges(&self) -> [core::ops::Range<usize>; 3] {
        [
            self.preparation[0]..self.preparation[1],
            self.execution[0]..self.execution[1],
            self.follow_through[0]..self.follow_through[1],
        ]
    }
}

/// Splits `[0, frames)` at floor(0.33·T) and floor(0.67·T). For very short
/// strokes the interior boundaries are nudged so that every phase keeps at
/// least one frame.
pub fn segment_phases(frames: usize) -> Result<Phases> {
    if frames < 3 {
        return Err(Error::InsufficientFrames { required: 3, available: frames });
    }
    let mut first = 33 * frames / 100;
    let mut second = 67 * frames / 100;
    first = first.max(1);
    second = second.max(first + 1).min(frames - 1);
    first = first.min(second - 1);
    Ok(Phases { preparation: [0, first], execution: [first, second], follow_through: [second, frames] })
}
