//! Command-line driver: synthetic corpora, per-plan pipeline runs,
//! correlation reports, embeddings, instance grouping and SVG figures.

pub mod cli;
pub mod commands;
pub mod config;
pub mod files;
pub mod svg;

use std::fmt;

pub use cli::{run, Cli};
pub use config::PipelineConfig;

/// Bad input (unreadable file, malformed JSON, invalid plan or flag value).
/// Maps to exit code 2; everything else is a runtime failure (1).
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if cause.is::<InputError>() || cause.is::<serde_json::Error>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<floorgrid::Error>() {
            if matches!(
                e,
                floorgrid::Error::Parse(_) | floorgrid::Error::InvalidArgument(_)
            ) {
                return 2;
            }
        }
    }
    1
}
