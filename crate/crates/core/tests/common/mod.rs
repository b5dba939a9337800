//! Brute-force reference implementations. Slow on purpose: every value is
//! recomputed from scratch per pixel or per pair.
#![allow(dead_code)]

use std::collections::VecDeque;

use floorgrid::density::DensityMap;
use floorgrid::encoding::DenseFeatureMap;
use floorgrid::floorplan::Floorplan;
use floorgrid::geometry::Point;
use floorgrid::grid::Grid;
use floorgrid::partition::UnitRegionPartition;
use floorgrid::raster::{rasterize_with, RasterMask, RasterTransform, INTERIOR};

/// Walks outward from every interior pixel in all four directions.
pub fn oracle_raw_sums(mask: &RasterMask) -> Grid<u32> {
    let (w, h) = (mask.width() as i64, mask.height() as i64);
    let inside = |x: i64, y: i64| {
        x >= 0 && y >= 0 && x < w && y < h && *mask.cells.get(x as usize, y as usize) == INTERIOR
    };
    Grid::from_fn(mask.width(), mask.height(), |x, y| {
        let (x, y) = (x as i64, y as i64);
        if !inside(x, y) {
            return 0;
        }
        let mut total = 1 + 1;
        for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            let (mut cx, mut cy) = (x + dx, y + dy);
            while inside(cx, cy) {
                total += 1;
                cx += dx;
                cy += dy;
            }
        }
        total
    })
}

pub fn oracle_density(mask: &RasterMask) -> DensityMap {
    let raw = oracle_raw_sums(mask);
    let values = Grid::from_fn(raw.width(), raw.height(), |x, y| {
        let s = *raw.get(x, y);
        if s == 0 {
            0.0
        } else {
            1.0 / s as f64
        }
    });
    DensityMap {
        values,
        raw_sums: raw,
    }
}

/// BFS labeling of equal nonzero values, seeds taken in scanline order.
pub fn flood_fill(values: &Grid<u32>) -> Grid<i32> {
    let (w, h) = (values.width(), values.height());
    let mut ids = Grid::new(w, h, -1);
    let mut next = 0;
    for sy in 0..h {
        for sx in 0..w {
            let key = *values.get(sx, sy);
            if key == 0 || *ids.get(sx, sy) >= 0 {
                continue;
            }
            let mut queue = VecDeque::from([(sx, sy)]);
            ids.set(sx, sy, next);
            while let Some((x, y)) = queue.pop_front() {
                let mut visit = |nx: usize, ny: usize| {
                    if *values.get(nx, ny) == key && *ids.get(nx, ny) < 0 {
                        ids.set(nx, ny, next);
                        queue.push_back((nx, ny));
                    }
                };
                if x > 0 {
                    visit(x - 1, y);
                }
                if x + 1 < w {
                    visit(x + 1, y);
                }
                if y > 0 {
                    visit(x, y - 1);
                }
                if y + 1 < h {
                    visit(x, y + 1);
                }
            }
            next += 1;
        }
    }
    ids
}

/// Mean of each channel over each region, scanning the whole grid per region.
pub fn oracle_pool_mean(fmap: &DenseFeatureMap, p: &UnitRegionPartition) -> Vec<Vec<f64>> {
    (0..p.len())
        .map(|id| {
            let mut sum = vec![0.0; fmap.channels];
            let mut n = 0usize;
            for y in 0..fmap.height {
                for x in 0..fmap.width {
                    if *p.region_id_grid.get(x, y) == id as i32 {
                        for (s, &v) in sum.iter_mut().zip(fmap.pixel(x, y)) {
                            *s += v as f64;
                        }
                        n += 1;
                    }
                }
            }
            sum.into_iter().map(|s| s / n as f64).collect()
        })
        .collect()
}

pub fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

pub fn ring(points: &[(f64, f64)]) -> Vec<Point> {
    points.iter().map(|&(x, y)| Point::new(x, y)).collect()
}

/// 16×16 square with the 6×6 north-east corner removed.
pub fn l_plan() -> Floorplan {
    Floorplan::new(
        ring(&[
            (0.0, 0.0),
            (16.0, 0.0),
            (16.0, 10.0),
            (10.0, 10.0),
            (10.0, 16.0),
            (0.0, 16.0),
        ]),
        0.25,
    )
}

/// One pixel per plan unit, no margin, no walls.
pub fn native_mask(plan: &Floorplan) -> RasterMask {
    rasterize_with(plan, RasterTransform::native(plan, 0), false)
        .unwrap()
        .mask
}

/// Interior test at pixel centers straight from the polygon, independent of
/// the scanline filler.
pub fn oracle_interior(plan: &Floorplan, t: &RasterTransform) -> Grid<bool> {
    let ring = t.apply_ring(&plan.vertices);
    Grid::from_fn(t.width, t.height, |x, y| {
        let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
        let mut inside = false;
        for i in 0..ring.len() {
            let (a, b) = (ring[i], ring[(i + 1) % ring.len()]);
            if (a.y >= py) != (b.y >= py) {
                let cross = a.x + (py - a.y) * (b.x - a.x) / (b.y - a.y);
                if px <= cross {
                    inside = !inside;
                }
            }
        }
        inside
    })
}
