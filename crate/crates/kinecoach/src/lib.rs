//! File formats, LLM client, batch pipeline and plot data for `kinecoach`.
//!
//! The numerical work lives in [`kinecoach_core`]; this crate adds everything
//! that touches the filesystem or the network.

pub mod cohort_io;
pub mod dashboard;
pub mod error;
pub mod formats;
pub mod llm;
pub mod pipeline;
pub mod ranges;
pub mod report_io;

pub use error::{IoError, IoResult};
pub use kinecoach_core as core;
