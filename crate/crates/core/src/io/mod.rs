//! File formats: FGRD binary grids, PGM images, partition sidecars and
//! feature CSVs. Floorplan JSON lives on [`crate::floorplan::Floorplan`].

pub mod csv;
pub mod fgrd;
pub mod pgm;
pub mod sidecar;

pub use fgrd::{read_fgrd, read_fgrd_frames, write_fgrd, CellType, FgrdCell};
