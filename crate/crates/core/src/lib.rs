//! Geometry-aware floorplan representation.
//!
//! A floorplan polygon is rasterized, each interior pixel gets a density from
//! the interior run lengths through it, connected pixels of equal density
//! form density regions, and those are sliced into unit regions under a
//! splitting strategy. Region labels, metrics and region encodings build on
//! that partition.

pub mod density;
pub mod encoding;
pub mod error;
pub mod floorplan;
pub mod geometry;
pub mod grid;
pub mod io;
pub mod labeling;
pub mod metrics;
pub mod partition;
pub mod pipeline;
pub mod raster;
pub mod report;
pub mod squeeze;
pub mod synth;
pub mod union_find;

pub use error::{Error, Result};
