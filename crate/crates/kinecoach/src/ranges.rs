//! Reference-range tables.
//!
//! File shape: `{ "<stroke>": { "<feature>": { "lo": 25, "hi": 35, "units": "m/s", "provenance": "..." } } }`.

use std::collections::BTreeMap;
use std::path::Path;

use kinecoach_core::{Interval, ReferenceTable};

use crate::error::{read_text, IoError, IoResult};

/// The bundled table. Apart from the forehand racket-velocity interval the
/// numbers are placeholders; every entry carries its provenance.
pub const DEFAULT_RANGES_JSON: &str = include_str!("../data/reference_ranges.json");

/// Parsed table plus warnings for unknown feature keys.
pub fn parse_ranges(text: &str, path: &Path) -> IoResult<(ReferenceTable, Vec<String>)> {
    let raw: BTreeMap<String, BTreeMap<String, Interval>> = serde_json::from_str(text)
        .map_err(|e| IoError::Parse { path: path.into(), line: e.line() as u64, message: e.to_string() })?;
    ReferenceTable::from_map(raw).map_err(|e| IoError::core(path, e))
}

pub fn default_ranges() -> ReferenceTable {
    parse_ranges(DEFAULT_RANGES_JSON, Path::new("<bundled reference_ranges.json>"))
        .expect("bundled reference table is valid")
        .0
}

/// Loads `path`, or the bundled table when `None`.
pub fn load_ranges(path: Option<&Path>) -> IoResult<(ReferenceTable, Vec<String>)> {
    match path {
        Some(path) => parse_ranges(&read_text(path)?, path),
        None => Ok((default_ranges(), Vec::new())),
    }
}
