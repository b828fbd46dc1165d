//! Pipeline orchestration, enriched GeoJSON output and aggregate reports for
//! the site planning layout indicators.

pub mod error;
pub mod pipeline;
pub mod report;
pub mod stages;
pub mod svg;
pub mod synth;

pub use error::{CliError, Result};
pub use pipeline::{run_pipeline, Manifest};
