//! Tennis stroke biomechanics, reference grounding and coaching-prompt tooling.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, networking and the
//! command line live in the `kinecoach` companion crate.

#![no_std]

extern crate alloc;

pub mod compliance;
pub mod error;
pub mod grounding;
pub mod joints;
pub mod kinematics;
pub mod numeric;
pub mod prompt;
pub mod skeleton;
pub mod stats;
pub mod synthetic;
pub mod vec3;

pub use compliance::{check_feedback, ComplianceReport};
pub use error::{Error, Result};
pub use grounding::{compare_report, compare_to_reference, Finding, Interval, ReferenceTable, Verdict};
pub use joints::{CanonicalJoint, JointMapper, Side};
pub use kinematics::{build_feature_report, FeatureReport, TimeSeries};
pub use prompt::{build_context_summary, PromptBundle};
pub use skeleton::{impute_gaps, map_joints, validate_sequence, RawMotionTable, RawRow, SkeletonSequence, ValidationMetrics};
pub use vec3::Vec3;
