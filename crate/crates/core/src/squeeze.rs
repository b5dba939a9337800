//! The squeeze operator: carve an axis-aligned notch into a rectilinear plan
//! from one side of its bounding box.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::floorplan::Floorplan;
use crate::geometry::{self, Point};
use crate::grid::Grid;

/// Side of the plan bounding box a squeeze pushes in from. North is +y.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    N,
    S,
    E,
    W,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::N, Side::S, Side::E, Side::W];

    /// Sides running along x (north/south) measure offsets from the west edge;
    /// east/west sides measure them from the south edge.
    pub fn runs_along_x(self) -> bool {
        matches!(self, Side::N | Side::S)
    }
}

/// Squeeze parameters: the notch spans `[start, end)` along the chosen side,
/// measured from the bbox corner, and reaches `depth` pixels inward.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SqueezeOp {
    pub side: Side,
    pub start: u32,
    pub end: u32,
    pub depth: u32,
}

/// Integer rectangle `[x0, x1] × [y0, y1]` in plan coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Notch {
    pub x0: i64,
    pub y0: i64,
    pub x1: i64,
    pub y1: i64,
}

impl Notch {
    pub fn area(&self) -> i64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }

    fn contains_cell(&self, x: i64, y: i64) -> bool {
        x >= self.x0 && x < self.x1 && y >= self.y0 && y < self.y1
    }
}

impl SqueezeOp {
    /// The notch rectangle this op would remove from `plan`.
    pub fn notch(&self, plan: &Floorplan) -> Result<Notch> {
        let bb = plan.bbox();
        let (minx, miny) = (bb.min.x as i64, bb.min.y as i64);
        let (maxx, maxy) = (bb.max.x as i64, bb.max.y as i64);
        let (side_len, across) = if self.side.runs_along_x() {
            (maxx - minx, maxy - miny)
        } else {
            (maxy - miny, maxx - minx)
        };
        let (start, end, depth) = (self.start as i64, self.end as i64, self.depth as i64);
        if start >= end {
            return Err(Error::InvalidSqueeze(format!(
                "start {start} must be below end {end}"
            )));
        }
        if end > side_len {
            return Err(Error::InvalidSqueeze(format!(
                "end {end} exceeds side length {side_len}"
            )));
        }
        if depth == 0 {
            return Err(Error::InvalidSqueeze("depth must be positive".into()));
        }
        if depth >= across {
            return Err(Error::InvalidSqueeze(format!(
                "depth {depth} reaches the opposite side (extent {across})"
            )));
        }
        Ok(match self.side {
            Side::N => Notch {
                x0: minx + start,
                x1: minx + end,
                y0: maxy - depth,
                y1: maxy,
            },
            Side::S => Notch {
                x0: minx + start,
                x1: minx + end,
                y0: miny,
                y1: miny + depth,
            },
            Side::E => Notch {
                x0: maxx - depth,
                x1: maxx,
                y0: miny + start,
                y1: miny + end,
            },
            Side::W => Notch {
                x0: minx,
                x1: minx + depth,
                y0: miny + start,
                y1: miny + end,
            },
        })
    }
}

/// Unit-cell occupancy of an integer rectilinear plan over its bbox.
pub(crate) fn plan_cells(plan: &Floorplan) -> (Grid<bool>, i64, i64) {
    let bb = plan.bbox();
    let (minx, miny) = (bb.min.x as i64, bb.min.y as i64);
    let w = (bb.max.x as i64 - minx) as usize;
    let h = (bb.max.y as i64 - miny) as usize;
    let cells = Grid::from_fn(w, h, |x, y| {
        plan.contains(Point::new(
            (minx + x as i64) as f64 + 0.5,
            (miny + y as i64) as f64 + 0.5,
        ))
    });
    (cells, minx, miny)
}

fn is_connected(cells: &Grid<bool>) -> bool {
    let total = cells.as_slice().iter().filter(|&&c| c).count();
    let Some(start) = cells.as_slice().iter().position(|&c| c) else {
        return false;
    };
    let mut seen = vec![false; cells.len()];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    let mut reached = 0;
    while let Some(i) = queue.pop_front() {
        reached += 1;
        let (x, y) = cells.coords(i);
        let (x, y) = (x as i64, y as i64);
        for (nx, ny) in [(x - 1, y), (x + 1, y), (x, y - 1), (x, y + 1)] {
            if let Some(&true) = cells.get_signed(nx, ny) {
                let j = cells.index(nx as usize, ny as usize);
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    reached == total
}

/// Removes the op's notch from `plan`.
///
/// Openings that no longer lie on the boundary are dropped, ground-truth rooms
/// are cleared and edge flags are recomputed.
pub fn squeeze(plan: &Floorplan, op: SqueezeOp) -> Result<Floorplan> {
    if !plan.is_integer_rectilinear() || !geometry::is_simple(&plan.vertices) {
        return Err(Error::InvalidSqueeze(
            "squeeze needs a simple integer rectilinear polygon".into(),
        ));
    }
    let notch = op.notch(plan)?;
    let (mut cells, minx, miny) = plan_cells(plan);
    let mut removed = 0usize;
    for y in 0..cells.height() {
        for x in 0..cells.width() {
            if *cells.get(x, y) && notch.contains_cell(minx + x as i64, miny + y as i64) {
                cells.set(x, y, false);
                removed += 1;
            }
        }
    }
    if removed == 0 {
        return Err(Error::InvalidSqueeze(
            "notch falls outside the polygon".into(),
        ));
    }
    if !is_connected(&cells) {
        return Err(Error::InvalidSqueeze(
            "notch disconnects the interior".into(),
        ));
    }
    let filled = |x: usize, y: usize| *cells.get(x, y);
    if geometry::has_pinch(cells.width(), cells.height(), filled) {
        return Err(Error::InvalidSqueeze(
            "notch leaves a diagonal pinch".into(),
        ));
    }
    let rings = geometry::trace_cells(cells.width(), cells.height(), filled);
    let [ring] = rings.as_slice() else {
        return Err(Error::InvalidSqueeze(
            "notch leaves a non-simple boundary".into(),
        ));
    };
    let vertices = ring
        .iter()
        .map(|p| Point::new(p.x + minx as f64, p.y + miny as f64))
        .collect();
    let mut out = Floorplan::new(vertices, plan.meters_per_pixel);
    out.openings = plan
        .openings
        .iter()
        .filter(|o| out.edge_containing(o.a, o.b).is_some())
        .cloned()
        .collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corner_notch_gives_l_shape() {
        let sq = Floorplan::rectangle(16.0, 16.0, 0.1);
        let op = SqueezeOp {
            side: Side::N,
            start: 10,
            end: 16,
            depth: 6,
        };
        let l = squeeze(&sq, op).unwrap();
        assert_eq!(l.vertices.len(), 6);
        assert_eq!(l.area(), 256.0 - 36.0);
        assert!(l.validate().is_empty());
    }

    #[test]
    fn mid_side_notch_adds_four_vertices() {
        let sq = Floorplan::rectangle(16.0, 16.0, 0.1);
        let op = SqueezeOp {
            side: Side::S,
            start: 4,
            end: 10,
            depth: 3,
        };
        let u = squeeze(&sq, op).unwrap();
        assert_eq!(u.vertices.len(), 8);
        assert_eq!(u.area(), 256.0 - 18.0);
    }

    #[test]
    fn full_depth_is_rejected() {
        let sq = Floorplan::rectangle(16.0, 16.0, 0.1);
        for depth in [16, 20] {
            let op = SqueezeOp {
                side: Side::E,
                start: 0,
                end: 4,
                depth,
            };
            assert!(matches!(squeeze(&sq, op), Err(Error::InvalidSqueeze(_))));
        }
    }

    #[test]
    fn disconnecting_notch_is_rejected() {
        // A U-shape whose remaining bridge is cut by a notch from the south.
        let sq = Floorplan::rectangle(16.0, 16.0, 0.1);
        let u = squeeze(
            &sq,
            SqueezeOp {
                side: Side::N,
                start: 6,
                end: 10,
                depth: 12,
            },
        )
        .unwrap();
        let op = SqueezeOp {
            side: Side::S,
            start: 6,
            end: 10,
            depth: 4,
        };
        assert!(matches!(squeeze(&u, op), Err(Error::InvalidSqueeze(_))));
    }

    #[test]
    fn notch_in_empty_space_is_rejected() {
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
        let op = SqueezeOp {
            side: Side::N,
            start: 11,
            end: 15,
            depth: 3,
        };
        assert!(matches!(squeeze(&l, op), Err(Error::InvalidSqueeze(_))));
    }

    #[test]
    fn invalid_ranges() {
        let sq = Floorplan::rectangle(16.0, 16.0, 0.1);
        for op in [
            SqueezeOp {
                side: Side::N,
                start: 5,
                end: 5,
                depth: 2,
            },
            SqueezeOp {
                side: Side::N,
                start: 5,
                end: 17,
                depth: 2,
            },
            SqueezeOp {
                side: Side::N,
                start: 5,
                end: 8,
                depth: 0,
            },
        ] {
            assert!(squeeze(&sq, op).is_err(), "{op:?}");
        }
    }

    #[test]
    fn diagonal_pinch_is_rejected() {
        let sq = Floorplan::rectangle(16.0, 16.0, 0.1);
        let a = squeeze(
            &sq,
            SqueezeOp {
                side: Side::N,
                start: 8,
                end: 16,
                depth: 8,
            },
        )
        .unwrap();
        // Leaves the (0..8, 8..16) and (8..16, 0..8) blocks touching at (8, 8).
        let op = SqueezeOp {
            side: Side::W,
            start: 0,
            end: 8,
            depth: 8,
        };
        assert!(matches!(squeeze(&a, op), Err(Error::InvalidSqueeze(_))));
    }

    #[test]
    fn openings_survive_when_still_on_boundary() {
        use crate::floorplan::{Opening, OpeningKind};
        let mut sq = Floorplan::rectangle(16.0, 16.0, 0.1);
        sq.openings = vec![
            Opening {
                a: Point::new(2.0, 0.0),
                b: Point::new(4.0, 0.0),
                kind: OpeningKind::FrontDoor,
                label: 3,
            },
            Opening {
                a: Point::new(12.0, 16.0),
                b: Point::new(14.0, 16.0),
                kind: OpeningKind::Window,
                label: 0,
            },
        ];
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
        assert_eq!(l.openings.len(), 1);
        assert_eq!(l.openings[0].kind, OpeningKind::FrontDoor);
    }
}
