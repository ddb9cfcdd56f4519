use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::{argmax, central_acceleration, central_difference, central_velocity, TimeSeries};
use crate::error::{Error, Result};
use crate::joints::CanonicalJoint;
use crate::skeleton::SkeletonSequence;

/// Speed, peak speed and impact estimate of the racket (or its proxy).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RacketDynamics {
    /// Speed magnitude for frames `1..T-1`.
    pub speed: TimeSeries,
    pub max_speed: f64,
    /// Acceleration magnitude for frames `2..T-2`; absent when `T < 5`.
    pub acceleration: Option<TimeSeries>,
    /// Frame of peak acceleration magnitude (earliest on ties).
    pub impact_frame: Option<usize>,
    pub impact_timing_pct: Option<f64>,
    pub peak_accel_mag: Option<f64>,
    pub marker: CanonicalJoint,
    /// True when the right hand stands in for a missing racket tip.
    pub proxy: bool,
}

/// Racket kinematics from `racket_tip`, falling back to `right_hand`.
pub fn racket_dynamics(seq: &SkeletonSequence) -> Result<RacketDynamics> {
    let (marker, proxy) = if seq.has(CanonicalJoint::RacketTip) {
        (CanonicalJoint::RacketTip, false)
    } else if seq.has(CanonicalJoint::RightHand) {
        (CanonicalJoint::RightHand, true)
    } else {
        return Err(Error::MissingEndEffector);
    };
    let path = seq.trajectory(marker).ok_or(Error::MissingEndEffector)?;
    let dt = seq.dt();
    let frames = seq.frames();

    let speed: Vec<f64> = central_velocity(&path, dt)?.iter().map(|v| v.norm()).collect();
    let speed = TimeSeries::starting_at(speed, dt, 1);
    let max_speed = speed.max().unwrap_or(0.0);

    let (acceleration, impact_frame, peak_accel_mag) = if frames >= 5 {
        let mags: Vec<f64> = central_acceleration(&path, dt)?.iter().map(|a| a.norm()).collect();
        let accel = TimeSeries::starting_at(mags, dt, 2);
        let frame = accel.argmax_frame();
        let peak = accel.max();
        (Some(accel), frame, peak)
    } else {
        (None, None, None)
    };
    let impact_timing_pct = impact_frame.map(|f| 100.0 * f as f64 / (frames - 1) as f64);

    Ok(RacketDynamics { speed, max_speed, acceleration, impact_frame, impact_timing_pct, peak_accel_mag, marker, proxy })
}

/// Peak-speed frame as a percentage of the stroke: `100 · argmax / (T − 1)`.
pub fn kinetic_chain_timing(speed: &TimeSeries, frames: usize) -> Option<f64> {
    let frame = speed.argmax_frame()?;
    if frames < 2 {
        return None;
    }
    Some(100.0 * frame as f64 / (frames - 1) as f64)
}

/// Kinetic energy per unit mass, `½ v²`.
pub fn kinetic_energy(speed: &TimeSeries) -> TimeSeries {
    TimeSeries {
        values: speed.values.iter().map(|v| 0.5 * v * v).collect(),
        ..speed.clone()
    }
}

/// Largest |dKE/dt| over interior samples (central difference), in watts per
/// kilogram.
pub fn peak_power(ke: &TimeSeries) -> Result<f64> {
    let rate = central_difference(&ke.values, ke.dt)?;
    let idx = argmax(&rate.iter().map(|r| r.abs()).collect::<Vec<_>>()).ok_or(Error::EmptyInput)?;
    Ok(rate[idx].abs())
}
