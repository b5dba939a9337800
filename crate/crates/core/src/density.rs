//! Geometry-aware density maps.
//!
//! For an interior pixel the distance to the boundary is measured along the
//! four axis directions and summed; opposite directions together span the
//! maximal interior run through the pixel, so the sum is `run_x + run_y`.
//! Density is the inverse of that sum and zero outside the interior.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::raster::RasterMask;

/// Maximal 4-connected interior run length through each pixel, per axis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunLengths {
    pub along_x: Grid<u32>,
    pub along_y: Grid<u32>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMap {
    pub values: Grid<f64>,
    /// `run_x + run_y` per pixel, zero outside.
    pub raw_sums: Grid<u32>,
}

/// Per-axis run-length maps.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisDensityMaps {
    pub x: Grid<f64>,
    pub y: Grid<f64>,
}

/// Normalized density: Sobel gradient magnitude of the raw sums scaled into `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedDensityMap {
    pub values: Grid<f64>,
}

/// Run lengths in two sweeps per axis: a forward pass counts the run so far,
/// a backward pass copies each run's total back over it.
pub fn directional_run_lengths(mask: &RasterMask) -> Result<RunLengths> {
    let (w, h) = (mask.width(), mask.height());
    let inside: Vec<bool> = mask
        .cells
        .as_slice()
        .iter()
        .map(|&c| c == crate::raster::INTERIOR)
        .collect();
    if !inside.contains(&true) {
        return Err(Error::EmptyInterior);
    }

    let mut along_x = vec![0u32; w * h];
    for y in 0..h {
        let row = y * w;
        for x in 0..w {
            if inside[row + x] {
                along_x[row + x] = if x > 0 { along_x[row + x - 1] + 1 } else { 1 };
            }
        }
        for x in (0..w.saturating_sub(1)).rev() {
            if inside[row + x] && inside[row + x + 1] {
                along_x[row + x] = along_x[row + x + 1];
            }
        }
    }

    let mut along_y = vec![0u32; w * h];
    for y in 0..h {
        let row = y * w;
        for x in 0..w {
            if inside[row + x] {
                along_y[row + x] = if y > 0 { along_y[row - w + x] + 1 } else { 1 };
            }
        }
    }
    for y in (0..h.saturating_sub(1)).rev() {
        let row = y * w;
        for x in 0..w {
            if inside[row + x] && inside[row + w + x] {
                along_y[row + x] = along_y[row + w + x];
            }
        }
    }

    Ok(RunLengths {
        along_x: Grid::from_vec(w, h, along_x).expect("sized"),
        along_y: Grid::from_vec(w, h, along_y).expect("sized"),
    })
}

impl DensityMap {
    /// Rebuilds values from raw sums; zero sums are exterior.
    pub fn from_raw_sums(raw_sums: Grid<u32>) -> Self {
        let values = raw_sums.map(|&s| if s == 0 { 0.0 } else { 1.0 / s as f64 });
        Self { values, raw_sums }
    }

    pub fn width(&self) -> usize {
        self.raw_sums.width()
    }

    pub fn height(&self) -> usize {
        self.raw_sums.height()
    }

    #[inline]
    pub fn is_interior(&self, x: usize, y: usize) -> bool {
        *self.raw_sums.get(x, y) != 0
    }

    /// Distinct interior raw sums, ascending.
    pub fn distinct_keys(&self) -> Vec<u32> {
        let mut keys: Vec<u32> = self
            .raw_sums
            .as_slice()
            .iter()
            .copied()
            .filter(|&s| s != 0)
            .collect();
        keys.sort_unstable();
        keys.dedup();
        keys
    }
}

pub fn density_map(mask: &RasterMask) -> Result<DensityMap> {
    let runs = directional_run_lengths(mask)?;
    let sums: Vec<u32> = runs
        .along_x
        .as_slice()
        .iter()
        .zip(runs.along_y.as_slice())
        .map(|(a, b)| a + b)
        .collect();
    Ok(DensityMap::from_raw_sums(
        Grid::from_vec(mask.width(), mask.height(), sums).expect("sized"),
    ))
}

/// The two per-axis maps; values are the run lengths themselves.
pub fn axis_density_maps(mask: &RasterMask) -> Result<AxisDensityMaps> {
    let runs = directional_run_lengths(mask)?;
    Ok(AxisDensityMaps {
        x: runs.along_x.map(|&v| v as f64),
        y: runs.along_y.map(|&v| v as f64),
    })
}

/// Sobel gradient magnitude over the raw sums (the inverse density), with
/// off-grid samples read as exterior zeros, clamped to 255 and divided by 255.
pub fn normalize_density(d: &DensityMap) -> NormalizedDensityMap {
    let raw = &d.raw_sums;
    let (w, h) = (raw.width(), raw.height());
    let at = |x: i64, y: i64| raw.get_signed(x, y).copied().unwrap_or(0) as f64;
    let values = Grid::from_fn(w, h, |x, y| {
        if *raw.get(x, y) == 0 {
            return 0.0;
        }
        let (x, y) = (x as i64, y as i64);
        let gx = (at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1))
            - (at(x - 1, y - 1) + 2.0 * at(x - 1, y) + at(x - 1, y + 1));
        let gy = (at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1))
            - (at(x - 1, y - 1) + 2.0 * at(x, y - 1) + at(x + 1, y - 1));
        gx.hypot(gy).min(255.0) / 255.0
    });
    NormalizedDensityMap { values }
}
