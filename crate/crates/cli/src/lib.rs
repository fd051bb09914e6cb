//! Batch front-end for count-data network inference: ingestion, the
//! preprocessing pipeline, benchmark orchestration, and report emission.

pub mod config;
pub mod error;
pub mod io;
pub mod pipeline;
pub mod report;

pub use error::{CliError, Result};
