use std::io;

use thiserror::Error;

/// Errors raised by floorplan construction, rasterization and analysis.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid squeeze: {0}")]
    InvalidSqueeze(String),
    #[error("polygon rasterizes to zero interior pixels")]
    DegeneratePolygon,
    #[error("mask has no interior pixels")]
    EmptyInterior,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("region {0} has no pixels")]
    EmptyRegion(usize),
    #[error("feature set is empty")]
    EmptyFeatureSet,
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
