//! Vector floorplan model and its invariants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, BBox, Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpeningKind {
    Door,
    Window,
    FrontDoor,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Opening {
    pub a: Point,
    pub b: Point,
    pub kind: OpeningKind,
    #[serde(default)]
    pub label: u32,
}

/// Ground-truth room: a simple polygon and its class id.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Room {
    pub polygon: Vec<Point>,
    pub label: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeFlag {
    AxisAligned,
    Sloping,
}

/// A single-storey floorplan: a counter-clockwise simple polygon in pixel
/// units, its openings and optional ground-truth rooms.
///
/// Edge `i` runs from `vertices[i]` to `vertices[(i + 1) % n]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Floorplan {
    pub meters_per_pixel: f64,
    pub vertices: Vec<Point>,
    #[serde(default)]
    pub openings: Vec<Opening>,
    #[serde(default, rename = "rooms", skip_serializing_if = "Option::is_none")]
    pub gt_rooms: Option<Vec<Room>>,
    #[serde(default)]
    pub edge_flags: Vec<EdgeFlag>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    TooFewVertices,
    NotSimple,
    NotCounterClockwise,
    NonPositiveScale,
    EdgeFlagsLength { expected: usize, found: usize },
    SlopingEdgeFlaggedAxisAligned(usize),
    OpeningOffBoundary(usize),
    RoomNotSimple(usize),
    RoomsDoNotTile,
}

impl Floorplan {
    /// Builds a plan with no openings or rooms; edge flags follow the geometry.
    pub fn new(vertices: Vec<Point>, meters_per_pixel: f64) -> Self {
        let mut plan = Self {
            meters_per_pixel,
            vertices,
            openings: Vec::new(),
            gt_rooms: None,
            edge_flags: Vec::new(),
        };
        plan.edge_flags = plan.geometric_edge_flags();
        plan
    }

    /// Axis-aligned `width × height` rectangle with its south-west corner at the origin.
    pub fn rectangle(width: f64, height: f64, meters_per_pixel: f64) -> Self {
        Self::new(
            vec![
                Point::new(0.0, 0.0),
                Point::new(width, 0.0),
                Point::new(width, height),
                Point::new(0.0, height),
            ],
            meters_per_pixel,
        )
    }

    pub fn edge(&self, i: usize) -> (Point, Point) {
        let n = self.vertices.len();
        (self.vertices[i], self.vertices[(i + 1) % n])
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        (0..self.vertices.len()).map(|i| self.edge(i))
    }

    pub fn geometric_edge_flags(&self) -> Vec<EdgeFlag> {
        self.edges()
            .map(|(a, b)| {
                if geometry::is_axis_aligned(a, b) {
                    EdgeFlag::AxisAligned
                } else {
                    EdgeFlag::Sloping
                }
            })
            .collect()
    }

    pub fn area(&self) -> f64 {
        geometry::signed_area(&self.vertices)
    }

    pub fn bbox(&self) -> BBox {
        BBox::of(&self.vertices).unwrap_or(BBox {
            min: Point::new(0.0, 0.0),
            max: Point::new(0.0, 0.0),
        })
    }

    /// True when every edge is axis-aligned and every vertex is on the integer lattice.
    pub fn is_integer_rectilinear(&self) -> bool {
        self.vertices
            .iter()
            .all(|p| p.x.fract() == 0.0 && p.y.fract() == 0.0)
            && self.edges().all(|(a, b)| geometry::is_axis_aligned(a, b))
    }

    pub fn contains(&self, p: Point) -> bool {
        geometry::contains(&self.vertices, p)
    }

    /// Index of the boundary edge containing segment `a–b`, if any.
    pub fn edge_containing(&self, a: Point, b: Point) -> Option<usize> {
        const EPS: f64 = 1e-9;
        if a == b {
            return None;
        }
        self.edges().position(|(p, q)| {
            geometry::point_segment_distance(a, p, q) <= EPS
                && geometry::point_segment_distance(b, p, q) <= EPS
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let mut plan: Floorplan = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::Parse(format!("field `{path}`: {}", e.into_inner()))
        })?;
        if plan.edge_flags.is_empty() {
            plan.edge_flags = plan.geometric_edge_flags();
        }
        Ok(plan)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("floorplan serializes")
    }

    /// Checks every plan invariant; the list is empty iff the plan is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.meters_per_pixel.is_nan() || self.meters_per_pixel <= 0.0 {
            out.push(Violation::NonPositiveScale);
        }
        if self.vertices.len() < 3 {
            out.push(Violation::TooFewVertices);
            return out;
        }
        let simple = geometry::is_simple(&self.vertices);
        if !simple {
            out.push(Violation::NotSimple);
        } else if self.area() <= 0.0 {
            out.push(Violation::NotCounterClockwise);
        }
        if self.edge_flags.len() != self.vertices.len() {
            out.push(Violation::EdgeFlagsLength {
                expected: self.vertices.len(),
                found: self.edge_flags.len(),
            });
        } else {
            for (i, (a, b)) in self.edges().enumerate() {
                if self.edge_flags[i] == EdgeFlag::AxisAligned && !geometry::is_axis_aligned(a, b) {
                    out.push(Violation::SlopingEdgeFlaggedAxisAligned(i));
                }
            }
        }
        for (i, o) in self.openings.iter().enumerate() {
            if self.edge_containing(o.a, o.b).is_none() {
                out.push(Violation::OpeningOffBoundary(i));
            }
        }
        if let Some(rooms) = &self.gt_rooms {
            let mut rooms_simple = true;
            for (i, r) in rooms.iter().enumerate() {
                if !geometry::is_simple(&r.polygon) {
                    out.push(Violation::RoomNotSimple(i));
                    rooms_simple = false;
                }
            }
            if simple && rooms_simple && !self.rooms_tile(rooms) {
                out.push(Violation::RoomsDoNotTile);
            }
        }
        out
    }

    /// Area bookkeeping plus a containment census at sample-cell centers:
    /// every interior sample must be claimed by exactly one room, every
    /// exterior sample by none.
    fn rooms_tile(&self, rooms: &[Room]) -> bool {
        let total: f64 = rooms
            .iter()
            .map(|r| geometry::signed_area(&r.polygon).abs())
            .sum();
        let area = self.area().abs();
        if (total - area).abs() > 1e-6 * area.max(1.0) {
            return false;
        }
        let bb = self.bbox();
        let extent = bb.width().max(bb.height());
        let step = (extent / 256.0).max(1.0);
        let nx = (bb.width() / step).ceil() as usize;
        let ny = (bb.height() / step).ceil() as usize;
        for j in 0..ny {
            for i in 0..nx {
                let p = Point::new(
                    bb.min.x + (i as f64 + 0.5) * step,
                    bb.min.y + (j as f64 + 0.5) * step,
                );
                let owners = rooms
                    .iter()
                    .filter(|r| geometry::contains(&r.polygon, p))
                    .count();
                let expected = usize::from(self.contains(p));
                if owners != expected {
                    return false;
                }
            }
        }
        true
    }
}
