//! Density-region clustering and the boundary-adaptive unit-region partition.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::density::DensityMap;
use crate::error::{Error, Result};
use crate::floorplan::{EdgeFlag, Floorplan};
use crate::geometry::{self, Point};
use crate::grid::{even_cuts, span_of, Grid, PixelRect};
use crate::raster::{RasterMask, RasterTransform};
use crate::union_find::UnionFind;

/// Splitting strategy `(M × N, h)`: up to `grid_m` columns and `grid_n` rows
/// per density region, each at least `min_size_m` meters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitStrategy {
    pub grid_m: u32,
    pub grid_n: u32,
    pub min_size_m: f64,
}

impl SplitStrategy {
    pub fn new(grid_m: u32, grid_n: u32, min_size_m: f64) -> Result<Self> {
        if grid_m == 0 || grid_n == 0 {
            return Err(Error::InvalidArgument(
                "grid counts must be at least 1".into(),
            ));
        }
        if min_size_m.is_nan() || min_size_m <= 0.0 {
            return Err(Error::InvalidArgument(
                "minimum cell size must be positive".into(),
            ));
        }
        Ok(Self {
            grid_m,
            grid_n,
            min_size_m,
        })
    }

    /// Cells along an extent of `pixels` at `meters_per_pixel`, reduced until
    /// each cell is at least `min_size_m` (never below one).
    fn effective(max: u32, pixels: usize, meters_per_pixel: f64, min_size_m: f64) -> u32 {
        // Tolerance absorbs the rounding in pixel * scale products.
        let fit = (pixels as f64 * meters_per_pixel / min_size_m + 1e-9).floor();
        (fit.min(max as f64) as u32).clamp(1, max)
    }

    pub fn grid_label(&self) -> String {
        format!("{}x{}", self.grid_m, self.grid_n)
    }
}

impl fmt::Display for SplitStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}:{}", self.grid_m, self.grid_n, self.min_size_m)
    }
}

impl FromStr for SplitStrategy {
    type Err = Error;

    /// Parses `MxN:h`, e.g. `8x8:1.0`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("strategy `{s}` is not of the form MxN:h"));
        let (grid, h) = s.split_once(':').ok_or_else(bad)?;
        let (m, n) = grid.split_once(['x', 'X']).ok_or_else(bad)?;
        let m = m.trim().parse().map_err(|_| bad())?;
        let n = n.trim().parse().map_err(|_| bad())?;
        let h = h.trim().parse().map_err(|_| bad())?;
        Self::new(m, n, h)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityRegion {
    pub id: usize,
    /// Pixels in scanline order (south row first, west to east).
    pub pixels: Vec<(usize, usize)>,
    pub density_key: u32,
    pub bbox: PixelRect,
    /// Set when sloping-wall merging joined several clusters.
    pub merged: bool,
}

/// Density regions of one raster, tiling its interior.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityRegions {
    pub width: usize,
    pub height: usize,
    pub regions: Vec<DensityRegion>,
}

impl DensityRegions {
    /// Region index per pixel, -1 outside.
    pub fn id_grid(&self) -> Grid<i32> {
        let mut grid = Grid::new(self.width, self.height, -1);
        for r in &self.regions {
            for &(x, y) in &r.pixels {
                grid.set(x, y, r.id as i32);
            }
        }
        grid
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }
}

/// Groups 4-connected interior pixels with equal raw density sums.
///
/// Two-pass labeling: provisional labels with union-find on the forward scan,
/// then ids assigned in order of each component's first scanline pixel.
pub fn cluster_density_regions(d: &DensityMap) -> Result<DensityRegions> {
    let raw = &d.raw_sums;
    let (w, h) = (raw.width(), raw.height());
    let keys = raw.as_slice();
    let mut provisional = vec![usize::MAX; w * h];
    let mut uf = UnionFind::new(0);
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let key = keys[i];
            if key == 0 {
                continue;
            }
            let west = (x > 0 && keys[i - 1] == key).then(|| provisional[i - 1]);
            let south = (y > 0 && keys[i - w] == key).then(|| provisional[i - w]);
            provisional[i] = match (west, south) {
                (Some(a), Some(b)) => {
                    uf.union(a, b);
                    a
                }
                (Some(a), None) | (None, Some(a)) => a,
                (None, None) => uf.push(),
            };
        }
    }
    if uf.is_empty() {
        return Err(Error::EmptyInterior);
    }

    let mut root_to_id: Vec<usize> = vec![usize::MAX; uf.len()];
    let mut regions: Vec<DensityRegion> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if keys[i] == 0 {
                continue;
            }
            let root = uf.find(provisional[i]);
            if root_to_id[root] == usize::MAX {
                root_to_id[root] = regions.len();
                regions.push(DensityRegion {
                    id: regions.len(),
                    pixels: Vec::new(),
                    density_key: keys[i],
                    bbox: PixelRect::point(x, y),
                    merged: false,
                });
            }
            let region = &mut regions[root_to_id[root]];
            region.pixels.push((x, y));
            region.bbox.include(x, y);
        }
    }
    Ok(DensityRegions {
        width: w,
        height: h,
        regions,
    })
}

/// Interior pixels whose centers lie within this distance of a sloping edge
/// count as touching it.
pub const SLOPING_ADJACENCY_PX: f64 = 1.0;

/// Unions every set of regions that touch the same sloping-flagged edge.
///
/// Merged regions take the density key of their lowest-id member. Without
/// sloping edges this is the identity.
pub fn merge_sloping(
    regions: &DensityRegions,
    plan: &Floorplan,
    transform: &RasterTransform,
) -> DensityRegions {
    let ids = regions.id_grid();
    let mut uf = UnionFind::new(regions.len());
    let mut touched_any = false;
    for (i, (a, b)) in plan.edges().enumerate() {
        if plan.edge_flags.get(i) != Some(&EdgeFlag::Sloping) {
            continue;
        }
        let (a, b) = (transform.apply(a), transform.apply(b));
        let reach = SLOPING_ADJACENCY_PX;
        let x_lo = (a.x.min(b.x) - reach - 1.0).floor().max(0.0) as usize;
        let y_lo = (a.y.min(b.y) - reach - 1.0).floor().max(0.0) as usize;
        let x_hi = ((a.x.max(b.x) + reach + 1.0).ceil().max(0.0) as usize).min(regions.width);
        let y_hi = ((a.y.max(b.y) + reach + 1.0).ceil().max(0.0) as usize).min(regions.height);
        let mut first: Option<usize> = None;
        for y in y_lo..y_hi {
            for x in x_lo..x_hi {
                let id = *ids.get(x, y);
                if id < 0 {
                    continue;
                }
                let center = Point::new(x as f64 + 0.5, y as f64 + 0.5);
                if geometry::point_segment_distance(center, a, b) <= reach {
                    match first {
                        Some(f) => touched_any |= uf.union(f, id as usize),
                        None => first = Some(id as usize),
                    }
                }
            }
        }
    }
    if !touched_any {
        return regions.clone();
    }

    let (labels, count) = uf.labels();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); count];
    for (old, &new) in labels.iter().enumerate() {
        members[new].push(old);
    }
    let mut out = Vec::with_capacity(count);
    for (new_id, group) in members.into_iter().enumerate() {
        let head = &regions.regions[group[0]];
        if group.len() == 1 {
            out.push(DensityRegion {
                id: new_id,
                ..head.clone()
            });
            continue;
        }
        let mut pixels: Vec<(usize, usize)> = group
            .iter()
            .flat_map(|&g| regions.regions[g].pixels.iter().copied())
            .collect();
        pixels.sort_unstable_by_key(|&(x, y)| (y, x));
        let bbox = PixelRect::of_pixels(&pixels).expect("non-empty");
        out.push(DensityRegion {
            id: new_id,
            pixels,
            density_key: head.density_key,
            bbox,
            merged: true,
        });
    }
    DensityRegions {
        width: regions.width,
        height: regions.height,
        regions: out,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitRegion {
    pub id: usize,
    /// Density region the cell was cut from; `None` for uniform grids.
    pub parent: Option<usize>,
    /// Cell index `(column, row)` within the parent's grid.
    pub cell: (u32, u32),
    #[serde(skip)]
    pub pixels: Vec<(usize, usize)>,
    pub bbox: PixelRect,
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnitRegionPartition {
    /// Region id per pixel, -1 outside the interior.
    pub region_id_grid: Grid<i32>,
    pub regions: Vec<UnitRegion>,
    /// `None` for uniform partitions.
    pub strategy: Option<SplitStrategy>,
    pub meters_per_pixel: f64,
}

impl UnitRegionPartition {
    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn width(&self) -> usize {
        self.region_id_grid.width()
    }

    pub fn height(&self) -> usize {
        self.region_id_grid.height()
    }

    /// Assembles a partition from bucketed cells, numbering ids in key order.
    fn from_cells(
        width: usize,
        height: usize,
        cells: BTreeMap<(usize, u32, u32), Vec<(usize, usize)>>,
        parents: bool,
        strategy: Option<SplitStrategy>,
        meters_per_pixel: f64,
    ) -> Self {
        let mut grid = Grid::new(width, height, -1);
        let mut regions = Vec::with_capacity(cells.len());
        for ((parent, j, i), mut pixels) in cells {
            let id = regions.len();
            pixels.sort_unstable_by_key(|&(x, y)| (y, x));
            for &(x, y) in &pixels {
                grid.set(x, y, id as i32);
            }
            let bbox = PixelRect::of_pixels(&pixels).expect("non-empty cell");
            regions.push(UnitRegion {
                id,
                parent: parents.then_some(parent),
                cell: (i, j),
                pixels,
                bbox,
            });
        }
        Self {
            region_id_grid: grid,
            regions,
            strategy,
            meters_per_pixel,
        }
    }

    /// Rebuilds pixel sets from the id grid, for partitions read from disk.
    pub fn from_parts(
        region_id_grid: Grid<i32>,
        mut regions: Vec<UnitRegion>,
        strategy: Option<SplitStrategy>,
        meters_per_pixel: f64,
    ) -> Result<Self> {
        for r in &mut regions {
            r.pixels.clear();
        }
        for y in 0..region_id_grid.height() {
            for x in 0..region_id_grid.width() {
                let id = *region_id_grid.get(x, y);
                if id < 0 {
                    continue;
                }
                let region = regions
                    .get_mut(id as usize)
                    .ok_or_else(|| Error::Parse(format!("region id {id} has no metadata")))?;
                region.pixels.push((x, y));
            }
        }
        if let Some(r) = regions.iter().find(|r| r.pixels.is_empty()) {
            return Err(Error::EmptyRegion(r.id));
        }
        Ok(Self {
            region_id_grid,
            regions,
            strategy,
            meters_per_pixel,
        })
    }
}

/// Slices each density region into its unit-region grid.
///
/// Per region the grid shrinks to `M' = clamp(min(M, floor(w·scale / h)), 1, M)`
/// columns (rows likewise), so cells keep at least `h` meters up to one pixel
/// of integer rounding. Cuts divide the region bbox evenly; leftover pixels go
/// to the south/west cells. Empty cells are dropped.
pub fn split_unit_regions(
    regions: &DensityRegions,
    s: &SplitStrategy,
    meters_per_pixel: f64,
) -> UnitRegionPartition {
    let mut cells: BTreeMap<(usize, u32, u32), Vec<(usize, usize)>> = BTreeMap::new();
    for region in &regions.regions {
        let bb = region.bbox;
        let m = SplitStrategy::effective(s.grid_m, bb.width(), meters_per_pixel, s.min_size_m);
        let n = SplitStrategy::effective(s.grid_n, bb.height(), meters_per_pixel, s.min_size_m);
        let xcuts = even_cuts(bb.width(), m as usize);
        let ycuts = even_cuts(bb.height(), n as usize);
        for &(x, y) in &region.pixels {
            let i = span_of(&xcuts, x - bb.x0) as u32;
            let j = span_of(&ycuts, y - bb.y0) as u32;
            cells.entry((region.id, j, i)).or_default().push((x, y));
        }
    }
    UnitRegionPartition::from_cells(
        regions.width,
        regions.height,
        cells,
        true,
        Some(*s),
        meters_per_pixel,
    )
}

/// Splits every unit region `factor × factor` within its own bbox, with no
/// minimum-size fallback. The result refines `p`.
pub fn refine(p: &UnitRegionPartition, factor: u32) -> UnitRegionPartition {
    let f = factor.max(1);
    let mut cells: BTreeMap<(usize, u32, u32), Vec<(usize, usize)>> = BTreeMap::new();
    for region in &p.regions {
        let bb = region.bbox;
        let xcuts = even_cuts(bb.width(), f as usize);
        let ycuts = even_cuts(bb.height(), f as usize);
        for &(x, y) in &region.pixels {
            let i = span_of(&xcuts, x - bb.x0) as u32;
            let j = span_of(&ycuts, y - bb.y0) as u32;
            cells.entry((region.id, j, i)).or_default().push((x, y));
        }
    }
    let mut out = UnitRegionPartition::from_cells(
        p.width(),
        p.height(),
        cells,
        true,
        p.strategy,
        p.meters_per_pixel,
    );
    // `from_cells` recorded the old region id as parent; map back to the
    // density parent and compose the cell index.
    let mut cursor = 0;
    for old in &p.regions {
        while cursor < out.regions.len() && out.regions[cursor].parent == Some(old.id) {
            let r = &mut out.regions[cursor];
            r.parent = old.parent;
            r.cell = (old.cell.0 * f + r.cell.0, old.cell.1 * f + r.cell.1);
            cursor += 1;
        }
    }
    out
}

fn interior_bbox(mask: &RasterMask) -> Result<PixelRect> {
    let mut bbox: Option<PixelRect> = None;
    for y in 0..mask.height() {
        for x in 0..mask.width() {
            if mask.is_interior(x, y) {
                match &mut bbox {
                    Some(b) => b.include(x, y),
                    None => bbox = Some(PixelRect::point(x, y)),
                }
            }
        }
    }
    bbox.ok_or(Error::EmptyInterior)
}

fn uniform_cells(
    mask: &RasterMask,
    bb: PixelRect,
    k: usize,
) -> BTreeMap<(usize, u32, u32), Vec<(usize, usize)>> {
    let xcuts = even_cuts(bb.width(), k);
    let ycuts = even_cuts(bb.height(), k);
    let mut cells: BTreeMap<(usize, u32, u32), Vec<(usize, usize)>> = BTreeMap::new();
    for y in bb.y0..bb.y1 {
        let j = span_of(&ycuts, y - bb.y0) as u32;
        for x in bb.x0..bb.x1 {
            if mask.is_interior(x, y) {
                let i = span_of(&xcuts, x - bb.x0) as u32;
                cells.entry((0, j, i)).or_default().push((x, y));
            }
        }
    }
    cells
}

fn uniform_count(mask: &RasterMask, bb: PixelRect, k: usize) -> usize {
    let xcuts = even_cuts(bb.width(), k);
    let ycuts = even_cuts(bb.height(), k);
    let mut hit = vec![false; k * k];
    for y in bb.y0..bb.y1 {
        let j = span_of(&ycuts, y - bb.y0);
        for x in bb.x0..bb.x1 {
            if mask.is_interior(x, y) {
                hit[j * k + span_of(&xcuts, x - bb.x0)] = true;
            }
        }
    }
    hit.iter().filter(|&&h| h).count()
}

/// Shape-agnostic `k × k` grid over the interior bbox, cells clipped to the
/// interior; `k` is chosen so the non-empty cell count is closest to
/// `target_count` (smaller `k` on ties).
pub fn uniform_partition(
    mask: &RasterMask,
    target_count: usize,
    meters_per_pixel: f64,
) -> Result<UnitRegionPartition> {
    let bb = interior_bbox(mask)?;
    let target = target_count.max(1);
    let k_max = bb.width().max(bb.height());
    let mut best = (usize::MAX, 1usize);
    let mut overshoots = 0;
    for k in 1..=k_max {
        let count = uniform_count(mask, bb, k);
        let diff = count.abs_diff(target);
        if diff < best.0 {
            best = (diff, k);
        }
        // Counts grow roughly with k², so a few consecutive overshoots end the search.
        if count > target {
            overshoots += 1;
            if overshoots >= 3 {
                break;
            }
        }
    }
    let k = best.1;
    let cells = uniform_cells(mask, bb, k);
    Ok(UnitRegionPartition::from_cells(
        mask.width(),
        mask.height(),
        cells,
        false,
        None,
        meters_per_pixel,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionStats {
    pub region_count: usize,
    pub mean_area_m2: f64,
    pub min_area_m2: f64,
    pub max_area_m2: f64,
}

pub fn partition_stats(p: &UnitRegionPartition) -> PartitionStats {
    let px_area = p.meters_per_pixel * p.meters_per_pixel;
    let areas: Vec<f64> = p
        .regions
        .iter()
        .map(|r| r.pixels.len() as f64 * px_area)
        .collect();
    let n = areas.len();
    PartitionStats {
        region_count: n,
        mean_area_m2: if n == 0 {
            0.0
        } else {
            areas.iter().sum::<f64>() / n as f64
        },
        min_area_m2: if n == 0 {
            0.0
        } else {
            areas.iter().copied().fold(f64::INFINITY, f64::min)
        },
        max_area_m2: areas.iter().copied().fold(0.0, f64::max),
    }
}

/// How far a partition's cells cross density-region borders.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Misalignment {
    /// Unit regions covering pixels of more than one density region.
    pub straddling_regions: usize,
    /// Pixels outside their unit region's dominant density region (lowest id on ties).
    pub misplaced_pixels: usize,
    pub misplaced_fraction: f64,
}

pub fn misalignment(p: &UnitRegionPartition, regions: &DensityRegions) -> Result<Misalignment> {
    if (p.width(), p.height()) != (regions.width, regions.height) {
        return Err(Error::ShapeMismatch(format!(
            "partition {}x{} vs density regions {}x{}",
            p.width(),
            p.height(),
            regions.width,
            regions.height
        )));
    }
    let parent = regions.id_grid();
    let (mut straddling, mut misplaced, mut total) = (0, 0, 0);
    for r in &p.regions {
        let mut counts: BTreeMap<i32, usize> = BTreeMap::new();
        for &(x, y) in &r.pixels {
            *counts.entry(*parent.get(x, y)).or_default() += 1;
        }
        let dominant = counts
            .iter()
            .map(|(&id, &n)| (n, std::cmp::Reverse(id)))
            .max()
            .map_or(0, |(n, _)| n);
        straddling += usize::from(counts.len() > 1);
        misplaced += r.pixels.len() - dominant;
        total += r.pixels.len();
    }
    Ok(Misalignment {
        straddling_regions: straddling,
        misplaced_pixels: misplaced,
        misplaced_fraction: if total == 0 {
            0.0
        } else {
            misplaced as f64 / total as f64
        },
    })
}
