//! Command-line front end: configuration ingestion, experiment
//! orchestration, CSV/JSON outputs and SVG plots.

pub mod commands;
pub mod config;
pub mod csvio;
pub mod error;
pub mod pipeline;
pub mod svg;

pub use error::{CliError, Result};
