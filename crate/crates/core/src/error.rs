use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A derivative or window needs more frames than the series has.
    InsufficientFrames { required: usize, available: usize },
    /// Two input joint names resolved to the same canonical joint in one frame.
    AmbiguousJoint { canonical: String, first: String, second: String, frame: i64 },
    DuplicateObservation { frame: i64, joint: String },
    /// Fewer than two valid frames to interpolate from.
    Imputation { joint: String, valid_frames: usize },
    DegenerateGeometry,
    MissingEndEffector,
    MissingJoint(&'static str),
    UnknownJoint(String),
    InvalidFrame(i64),
    EmptyInput,
    InvalidSampleRate(f64),
    InvalidInterval { stroke: String, feature: String, lo: f64, hi: f64 },
    /// Zero pooled variance, or too few observations for a statistic.
    DegenerateSample(&'static str),
    EmptyGroup(&'static str),
    ImpactOutOfRange { series: usize, frame: usize, len: usize },
    LengthMismatch { expected: usize, found: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InsufficientFrames { required, available } => {
                write!(f, "insufficient frames: need at least {required}, got {available}")
            }
            Error::AmbiguousJoint { canonical, first, second, frame } => write!(
                f,
                "ambiguous joint mapping at frame {frame}: '{first}' and '{second}' both map to {canonical}"
            ),
            Error::DuplicateObservation { frame, joint } => {
                write!(f, "duplicate observation for joint '{joint}' at frame {frame}")
            }
            Error::Imputation { joint, valid_frames } => write!(
                f,
                "cannot impute joint '{joint}': {valid_frames} valid frame(s), need at least 2"
            ),
            Error::DegenerateGeometry => f.write_str("degenerate geometry: zero-length joint vector"),
            Error::MissingEndEffector => {
                f.write_str("missing end effector: neither racket_tip nor right_hand is available")
            }
            Error::MissingJoint(name) => write!(f, "required joint '{name}' is not available"),
            Error::UnknownJoint(name) => write!(f, "'{name}' is not a canonical joint name"),
            Error::InvalidFrame(frame) => write!(f, "frame index {frame} is negative"),
            Error::EmptyInput => f.write_str("empty input"),
            Error::InvalidSampleRate(r) => write!(f, "sample rate must be positive and finite, got {r}"),
            Error::InvalidInterval { stroke, feature, lo, hi } => write!(
                f,
                "invalid reference interval for {stroke}/{feature}: lo {lo} > hi {hi}"
            ),
            Error::DegenerateSample(why) => write!(f, "degenerate sample: {why}"),
            Error::EmptyGroup(group) => write!(f, "group '{group}' has no samples"),
            Error::ImpactOutOfRange { series, frame, len } => write!(
                f,
                "impact frame {frame} out of range for series {series} of length {len}"
            ),
            Error::LengthMismatch { expected, found } => {
                write!(f, "length mismatch: expected {expected}, found {found}")
            }
        }
    }
}

impl core::error::Error for Error {}
