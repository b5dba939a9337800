//! Rasterization of vector plans onto label grids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::floorplan::{Floorplan, OpeningKind};
use crate::geometry::{self, Point};
use crate::grid::Grid;
use crate::labeling::LabelMap;

pub const EXTERIOR: u8 = 0;
pub const INTERIOR: u8 = 1;
pub const EXTERIOR_WALL: u8 = 2;
pub const FRONT_DOOR: u8 = 3;
pub const DOOR: u8 = 4;
pub const WINDOW: u8 = 5;

/// Highest code a mask may carry.
pub const MAX_CODE: u8 = WINDOW;

pub fn opening_code(kind: OpeningKind) -> u8 {
    match kind {
        OpeningKind::FrontDoor => FRONT_DOOR,
        OpeningKind::Door => DOOR,
        OpeningKind::Window => WINDOW,
    }
}

/// Per-pixel plan codes. Only [`INTERIOR`] pixels count as inside.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RasterMask {
    pub cells: Grid<u8>,
}

impl RasterMask {
    pub fn new(cells: Grid<u8>) -> Self {
        Self { cells }
    }

    /// Mask from an interior predicate; everything else is exterior.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut inside: impl FnMut(usize, usize) -> bool,
    ) -> Self {
        Self::new(Grid::from_fn(width, height, |x, y| {
            if inside(x, y) {
                INTERIOR
            } else {
                EXTERIOR
            }
        }))
    }

    pub fn width(&self) -> usize {
        self.cells.width()
    }

    pub fn height(&self) -> usize {
        self.cells.height()
    }

    #[inline]
    pub fn is_interior(&self, x: usize, y: usize) -> bool {
        *self.cells.get(x, y) == INTERIOR
    }

    #[inline]
    pub fn is_interior_index(&self, i: usize) -> bool {
        self.cells.as_slice()[i] == INTERIOR
    }

    pub fn interior_count(&self) -> usize {
        self.cells
            .as_slice()
            .iter()
            .filter(|&&c| c == INTERIOR)
            .count()
    }

    pub fn codes_valid(&self) -> bool {
        self.cells.as_slice().iter().all(|&c| c <= MAX_CODE)
    }

    /// True when the interior is non-empty and 4-connected.
    pub fn interior_is_connected(&self) -> bool {
        let total = self.interior_count();
        let Some(start) = self.cells.as_slice().iter().position(|&c| c == INTERIOR) else {
            return false;
        };
        let mut seen = vec![false; self.cells.len()];
        let mut stack = vec![start];
        seen[start] = true;
        let mut reached = 0;
        while let Some(i) = stack.pop() {
            reached += 1;
            let (x, y) = self.cells.coords(i);
            let (x, y) = (x as i64, y as i64);
            for (nx, ny) in [(x - 1, y), (x + 1, y), (x, y - 1), (x, y + 1)] {
                if self.cells.get_signed(nx, ny) == Some(&INTERIOR) {
                    let j = self.cells.index(nx as usize, ny as usize);
                    if !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        reached == total
    }
}

/// Placement of plan coordinates on the raster grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RasterTransform {
    /// Raster pixels per plan unit.
    pub scale: f64,
    /// Plan-space point mapped to `offset`.
    pub origin: Point,
    pub offset: Point,
    pub width: usize,
    pub height: usize,
    /// Physical size of one raster pixel.
    pub meters_per_pixel: f64,
}

impl RasterTransform {
    /// Scales the plan to fit a `resolution²` grid inside a `margin` pixel
    /// border and centers it. Scales of at least one are rounded down to an
    /// integer so lattice-aligned plans stay lattice-aligned.
    pub fn fit(plan: &Floorplan, resolution: usize, margin: usize) -> Result<Self> {
        let bb = plan.bbox();
        let extent = bb.width().max(bb.height());
        if extent.is_nan() || extent <= 0.0 {
            return Err(Error::DegeneratePolygon);
        }
        if resolution <= 2 * margin {
            return Err(Error::InvalidArgument(format!(
                "resolution {resolution} leaves no room inside margin {margin}"
            )));
        }
        let raw = (resolution - 2 * margin) as f64 / extent;
        let scale = if raw >= 1.0 { raw.floor() } else { raw };
        let offset = Point::new(
            ((resolution as f64 - bb.width() * scale) / 2.0).floor(),
            ((resolution as f64 - bb.height() * scale) / 2.0).floor(),
        );
        Ok(Self {
            scale,
            origin: bb.min,
            offset,
            width: resolution,
            height: resolution,
            meters_per_pixel: plan.meters_per_pixel / scale,
        })
    }

    /// One raster pixel per plan unit, with a `margin` pixel border.
    pub fn native(plan: &Floorplan, margin: usize) -> Self {
        let bb = plan.bbox();
        Self {
            scale: 1.0,
            origin: bb.min,
            offset: Point::new(margin as f64, margin as f64),
            width: bb.width().ceil() as usize + 2 * margin,
            height: bb.height().ceil() as usize + 2 * margin,
            meters_per_pixel: plan.meters_per_pixel,
        }
    }

    pub fn apply(&self, p: Point) -> Point {
        Point::new(
            (p.x - self.origin.x) * self.scale + self.offset.x,
            (p.y - self.origin.y) * self.scale + self.offset.y,
        )
    }

    pub fn apply_ring(&self, ring: &[Point]) -> Vec<Point> {
        ring.iter().map(|&p| self.apply(p)).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Raster {
    pub mask: RasterMask,
    pub transform: RasterTransform,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RasterOptions {
    pub resolution: usize,
    pub margin: usize,
    /// Mark exterior pixels touching the interior (8-neighbourhood) as wall.
    pub walls: bool,
}

impl Default for RasterOptions {
    fn default() -> Self {
        Self {
            resolution: 256,
            margin: 2,
            walls: true,
        }
    }
}

/// Fills every row of `grid` whose pixel centers fall inside `ring` (raster
/// coordinates) by calling `mark(x, y)`.
pub(crate) fn scan_fill(
    ring: &[Point],
    width: usize,
    height: usize,
    mut mark: impl FnMut(usize, usize),
) {
    let Some(bb) = geometry::BBox::of(ring) else {
        return;
    };
    let y_lo = (bb.min.y - 0.5).floor().max(0.0) as usize;
    let y_hi = ((bb.max.y + 0.5).ceil().max(0.0) as usize).min(height);
    for y in y_lo..y_hi {
        let cy = y as f64 + 0.5;
        let mut xs = geometry::row_crossings(ring, cy);
        if xs.is_empty() {
            continue;
        }
        xs.sort_by(f64::total_cmp);
        // A center `cx` is inside when an odd number of crossings satisfy cx <= x.
        for pair in xs.chunks(2) {
            let [lo, hi] = pair else { break };
            // Inside iff lo < cx <= hi.
            let first = (lo - 0.5).floor() + 1.0;
            let last = (hi - 0.5).floor();
            let first = first.max(0.0) as usize;
            if last < 0.0 {
                continue;
            }
            let last = (last as usize).min(width.saturating_sub(1));
            for x in first..=last {
                mark(x, y);
            }
        }
    }
}

/// Rasterizes `plan` after scaling it to fit the target grid.
///
/// A pixel is interior iff its center lies inside the polygon. Openings are
/// stamped onto the non-interior pixels adjacent to their segment.
pub fn rasterize(plan: &Floorplan, opts: &RasterOptions) -> Result<Raster> {
    let transform = RasterTransform::fit(plan, opts.resolution, opts.margin)?;
    rasterize_with(plan, transform, opts.walls)
}

pub fn rasterize_with(plan: &Floorplan, transform: RasterTransform, walls: bool) -> Result<Raster> {
    let (w, h) = (transform.width, transform.height);
    let ring = transform.apply_ring(&plan.vertices);
    let mut cells = Grid::new(w, h, EXTERIOR);
    scan_fill(&ring, w, h, |x, y| cells.set(x, y, INTERIOR));
    if !cells.as_slice().contains(&INTERIOR) {
        return Err(Error::DegeneratePolygon);
    }
    if walls {
        let snapshot = cells.clone();
        for y in 0..h {
            for x in 0..w {
                if *snapshot.get(x, y) == INTERIOR {
                    continue;
                }
                let touches = (-1i64..=1).any(|dy| {
                    (-1i64..=1).any(|dx| {
                        snapshot.get_signed(x as i64 + dx, y as i64 + dy) == Some(&INTERIOR)
                    })
                });
                if touches {
                    cells.set(x, y, EXTERIOR_WALL);
                }
            }
        }
    }
    for opening in &plan.openings {
        stamp_opening(
            &mut cells,
            transform.apply(opening.a),
            transform.apply(opening.b),
            opening_code(opening.kind),
        );
    }
    Ok(Raster {
        mask: RasterMask::new(cells),
        transform,
    })
}

fn stamp_opening(cells: &mut Grid<u8>, a: Point, b: Point, code: u8) {
    let len = a.dist(b);
    if len == 0.0 {
        return;
    }
    let (ux, uy) = ((b.x - a.x) / len, (b.y - a.y) / len);
    let (nx, ny) = (-uy, ux);
    let samples = (len * 4.0).ceil() as usize;
    let pixel = |p: Point| -> Option<(usize, usize)> {
        let (x, y) = (p.x.floor(), p.y.floor());
        (x >= 0.0 && y >= 0.0 && (x as usize) < cells.width() && (y as usize) < cells.height())
            .then_some((x as usize, y as usize))
    };
    let mut hits = Vec::new();
    for k in 0..samples {
        let t = (k as f64 + 0.5) / samples as f64 * len;
        let s = Point::new(a.x + ux * t, a.y + uy * t);
        let left = pixel(Point::new(s.x + 0.5 * nx, s.y + 0.5 * ny));
        let right = pixel(Point::new(s.x - 0.5 * nx, s.y - 0.5 * ny));
        let is_in =
            |p: Option<(usize, usize)>| p.is_some_and(|(x, y)| *cells.get(x, y) == INTERIOR);
        let target = match (is_in(left), is_in(right)) {
            (true, false) => right,
            (false, true) => left,
            _ => None,
        };
        if let Some(p) = target {
            hits.push(p);
        }
    }
    for (x, y) in hits {
        cells.set(x, y, code);
    }
}

/// Paints ground-truth room labels onto the interior pixels of `mask`.
/// Interior pixels claimed by no room stay at -1.
pub fn rasterize_rooms(plan: &Floorplan, raster: &Raster, class_names: &[String]) -> LabelMap {
    let (w, h) = (raster.mask.width(), raster.mask.height());
    let mut labels = Grid::new(w, h, -1i32);
    if let Some(rooms) = &plan.gt_rooms {
        for room in rooms {
            let ring = raster.transform.apply_ring(&room.polygon);
            scan_fill(&ring, w, h, |x, y| {
                if raster.mask.is_interior(x, y) && *labels.get(x, y) < 0 {
                    labels.set(x, y, room.label as i32);
                }
            });
        }
    }
    LabelMap::new(labels, class_names.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floorplan::Opening;
    use crate::squeeze::{squeeze, Side, SqueezeOp};

    #[test]
    fn square_fills_grid_without_margin() {
        let plan = Floorplan::rectangle(64.0, 64.0, 0.1);
        let r = rasterize(
            &plan,
            &RasterOptions {
                resolution: 64,
                margin: 0,
                walls: true,
            },
        )
        .unwrap();
        assert_eq!(r.mask.interior_count(), 64 * 64);
        assert_eq!(r.transform.scale, 1.0);
    }

    #[test]
    fn scan_fill_matches_point_test() {
        let plan = Floorplan::new(
            vec![
                Point::new(0.0, 0.0),
                Point::new(10.0, 0.0),
                Point::new(10.0, 3.0),
                Point::new(4.5, 9.25),
                Point::new(0.0, 7.0),
            ],
            1.0,
        );
        let t = RasterTransform::fit(&plan, 37, 3).unwrap();
        let ring = t.apply_ring(&plan.vertices);
        let mut filled = Grid::new(37, 37, false);
        scan_fill(&ring, 37, 37, |x, y| filled.set(x, y, true));
        for y in 0..37 {
            for x in 0..37 {
                let c = Point::new(x as f64 + 0.5, y as f64 + 0.5);
                assert_eq!(*filled.get(x, y), geometry::contains(&ring, c), "({x},{y})");
            }
        }
    }

    #[test]
    fn l_shape_pixel_count_matches_area() {
        let sq = Floorplan::rectangle(16.0, 16.0, 0.1);
        let l = squeeze(
            &sq,
            SqueezeOp {
                side: Side::N,
                start: 10,
                end: 16,
                depth: 6,
            },
        )
        .unwrap();
        let r = rasterize_with(&l, RasterTransform::native(&l, 1), true).unwrap();
        assert_eq!(r.mask.interior_count(), 256 - 36);
        assert!(r.mask.interior_is_connected());
    }

    #[test]
    fn front_door_stamped_on_south_wall() {
        let mut plan = Floorplan::rectangle(16.0, 16.0, 0.1);
        plan.openings.push(Opening {
            a: Point::new(4.0, 0.0),
            b: Point::new(8.0, 0.0),
            kind: OpeningKind::FrontDoor,
            label: 3,
        });
        let r = rasterize_with(&plan, RasterTransform::native(&plan, 2), true).unwrap();
        let doors: Vec<(usize, usize)> = (0..r.mask.height())
            .flat_map(|y| (0..r.mask.width()).map(move |x| (x, y)))
            .filter(|&(x, y)| *r.mask.cells.get(x, y) == FRONT_DOOR)
            .collect();
        assert_eq!(doors, vec![(6, 1), (7, 1), (8, 1), (9, 1)]);
        assert_eq!(r.mask.interior_count(), 256);
        assert!(r.mask.codes_valid());
    }

    #[test]
    fn walls_ring_the_interior() {
        let plan = Floorplan::rectangle(4.0, 4.0, 0.1);
        let r = rasterize_with(&plan, RasterTransform::native(&plan, 2), true).unwrap();
        let walls = r
            .mask
            .cells
            .as_slice()
            .iter()
            .filter(|&&c| c == EXTERIOR_WALL)
            .count();
        assert_eq!(walls, 6 * 6 - 16);
    }

    #[test]
    fn degenerate_polygon() {
        let plan = Floorplan::new(
            vec![
                Point::new(0.0, 0.0),
                Point::new(10.0, 0.0),
                Point::new(10.0, 0.2),
                Point::new(0.0, 0.2),
            ],
            1.0,
        );
        let t = RasterTransform::native(&plan, 0);
        assert!(matches!(
            rasterize_with(&plan, t, false),
            Err(Error::DegeneratePolygon)
        ));
    }

    #[test]
    fn fit_uses_integer_scale_when_enlarging() {
        let plan = Floorplan::rectangle(64.0, 48.0, 0.2);
        let t = RasterTransform::fit(&plan, 256, 2).unwrap();
        assert_eq!(t.scale, 3.0);
        assert_eq!(t.offset, Point::new(32.0, 56.0));
        assert!((t.meters_per_pixel - 0.2 / 3.0).abs() < 1e-15);
    }
}
