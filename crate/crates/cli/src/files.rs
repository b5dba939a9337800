//! Reading inputs and writing artifacts, with paths in every error.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use floorgrid::floorplan::Floorplan;
use floorgrid::grid::Grid;
use floorgrid::io::{read_fgrd, write_fgrd, FgrdCell};

use crate::InputError;

pub fn read_input(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| InputError(format!("cannot read {}: {e}", path.display())).into())
}

/// Parses and validates a plan file.
pub fn load_plan(path: &Path) -> Result<Floorplan> {
    let text = read_input(path)?;
    let plan =
        Floorplan::from_json(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    let violations = plan.validate();
    if !violations.is_empty() {
        return Err(InputError(format!(
            "{}: invalid floorplan: {violations:?}",
            path.display()
        ))
        .into());
    }
    Ok(plan)
}

pub fn read_grid<T: FgrdCell>(path: &Path) -> Result<Grid<T>> {
    let file =
        File::open(path).map_err(|e| InputError(format!("cannot read {}: {e}", path.display())))?;
    read_fgrd(&mut BufReader::new(file))
        .map_err(|e| InputError(format!("{}: {e}", path.display())).into())
}

pub fn write_grids<T: FgrdCell>(path: &Path, frames: &[&Grid<T>]) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut out = BufWriter::new(file);
    for g in frames {
        write_fgrd(&mut out, g).with_context(|| format!("writing {}", path.display()))?;
    }
    out.flush()
        .with_context(|| format!("writing {}", path.display()))
}

pub fn write_grid<T: FgrdCell>(path: &Path, grid: &Grid<T>) -> Result<()> {
    write_grids(path, &[grid])
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

pub fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).with_context(|| format!("creating {}", path.display()))
}

/// File name without directories, for reproducible metadata.
pub fn display_name(path: &Path) -> String {
    path.file_name().map_or_else(
        || path.display().to_string(),
        |n| n.to_string_lossy().into_owned(),
    )
}
