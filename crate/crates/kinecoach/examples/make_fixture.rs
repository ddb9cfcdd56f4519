//! Regenerates the bundled synthetic forehand fixtures.
//!
//! ```text
//! cargo run -p kinecoach --example make_fixture -- crates/kinecoach/data
//! ```

use std::path::PathBuf;

use kinecoach::formats::{sequence_to_json, table_to_csv};
use kinecoach_core::synthetic::scripted_stroke;
use kinecoach_core::CanonicalJoint;

fn main() -> anyhow::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "data".into()));
    std::fs::create_dir_all(&dir)?;
    let seq = scripted_stroke(90, 60.0)?;
    let idx = |j: CanonicalJoint| seq.joints().iter().position(|x| *x == j).expect("joint present");
    let missing = [
        (20, idx(CanonicalJoint::LeftWrist)),
        (21, idx(CanonicalJoint::LeftWrist)),
        (45, idx(CanonicalJoint::RightElbow)),
    ];
    std::fs::write(dir.join("synthetic_forehand.json"), sequence_to_json(&seq, Some("forehand_flat"), &missing))?;
    std::fs::write(dir.join("synthetic_forehand.csv"), table_to_csv(&seq.to_table()))?;
    Ok(())
}
