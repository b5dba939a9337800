//! Planar primitives shared by the floorplan, raster and figure code.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Self { x, y }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl From<(i64, i64)> for Point {
    fn from((x, y): (i64, i64)) -> Self {
        Self::new(x as f64, y as f64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BBox {
    pub min: Point,
    pub max: Point,
}

impl BBox {
    pub fn of(points: &[Point]) -> Option<Self> {
        let first = *points.first()?;
        let mut b = BBox {
            min: first,
            max: first,
        };
        for p in &points[1..] {
            b.min.x = b.min.x.min(p.x);
            b.min.y = b.min.y.min(p.y);
            b.max.x = b.max.x.max(p.x);
            b.max.y = b.max.y.max(p.y);
        }
        Some(b)
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }
}

/// Shoelace area, positive for counter-clockwise rings.
pub fn signed_area(ring: &[Point]) -> f64 {
    let n = ring.len();
    if n < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        acc += a.x * b.y - b.x * a.y;
    }
    acc * 0.5
}

/// Crossing-number containment test.
///
/// Points exactly on an edge are owned half-open: a point on a vertical edge
/// belongs to the ring on the west side of it, a point on a horizontal edge to
/// the ring on the south side. Rings that tile a region therefore claim every
/// point exactly once.
pub fn contains(ring: &[Point], p: Point) -> bool {
    row_crossings(ring, p.y)
        .iter()
        .filter(|&&x| p.x <= x)
        .count()
        % 2
        == 1
}

/// X coordinates where the horizontal line at `y` crosses ring edges, using
/// the same half-open rule as [`contains`]. Unsorted.
pub fn row_crossings(ring: &[Point], y: f64) -> Vec<f64> {
    let n = ring.len();
    let mut xs = Vec::new();
    let mut j = n.wrapping_sub(1);
    for i in 0..n {
        let a = ring[i];
        let b = ring[j];
        if (a.y >= y) != (b.y >= y) {
            xs.push(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
        }
        j = i;
    }
    xs
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection, touching endpoints included.
pub fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if ((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0))
        && ((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0))
    {
        return true;
    }
    (o1 == 0.0 && on_segment(a, b, c))
        || (o2 == 0.0 && on_segment(a, b, d))
        || (o3 == 0.0 && on_segment(c, d, a))
        || (o4 == 0.0 && on_segment(c, d, b))
}

/// True when the closed ring has at least three vertices, no repeated
/// consecutive vertices, no fold-backs and no crossing or touching edges.
pub fn is_simple(ring: &[Point]) -> bool {
    let n = ring.len();
    if n < 3 {
        return false;
    }
    let edge = |i: usize| (ring[i], ring[(i + 1) % n]);
    for i in 0..n {
        let (a, b) = edge(i);
        if a == b {
            return false;
        }
        // Consecutive edges may only share their common vertex.
        let (_, c) = edge((i + 1) % n);
        if orient(a, b, c) == 0.0 && (c.x - b.x) * (b.x - a.x) + (c.y - b.y) * (b.y - a.y) < 0.0 {
            return false;
        }
    }
    for i in 0..n {
        let (a, b) = edge(i);
        for j in i + 1..n {
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            let (c, d) = edge(j);
            if segments_intersect(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0);
    p.dist(Point::new(a.x + t * dx, a.y + t * dy))
}

pub fn is_axis_aligned(a: Point, b: Point) -> bool {
    a.x == b.x || a.y == b.y
}

/// Drops vertices that lie on the straight line between their neighbours.
pub fn merge_collinear(ring: &[Point]) -> Vec<Point> {
    let mut out: Vec<Point> = ring.to_vec();
    loop {
        let n = out.len();
        if n < 3 {
            return out;
        }
        let redundant = (0..n).find(|&i| {
            let prev = out[(i + n - 1) % n];
            let next = out[(i + 1) % n];
            out[i] == prev || orient(prev, out[i], next) == 0.0
        });
        match redundant {
            Some(i) => {
                out.remove(i);
            }
            None => return out,
        }
    }
}

/// Boundary rings of a cell set on the unit lattice.
///
/// Cell `(x, y)` covers `[x, x+1] × [y, y+1]`. Outer rings come out
/// counter-clockwise and holes clockwise, collinear vertices merged. At
/// pinch vertices (two cells touching only diagonally) the trace turns left,
/// so diagonal neighbours end up on separate rings.
pub fn trace_cells(
    width: usize,
    height: usize,
    filled: impl Fn(usize, usize) -> bool,
) -> Vec<Vec<Point>> {
    let at = |x: i64, y: i64| -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < width
            && (y as usize) < height
            && filled(x as usize, y as usize)
    };
    // Directed unit edges keyed by their start vertex.
    let stride = width as i64 + 1;
    let key = |x: i64, y: i64| (y * stride + x) as usize;
    let mut outgoing: Vec<[Option<(i64, i64)>; 2]> = vec![[None, None]; (width + 1) * (height + 1)];
    let mut add = |from: (i64, i64), to: (i64, i64)| {
        let slot = &mut outgoing[key(from.0, from.1)];
        if slot[0].is_none() {
            slot[0] = Some(to);
        } else {
            slot[1] = Some(to);
        }
    };
    for y in 0..height as i64 {
        for x in 0..width as i64 {
            if !at(x, y) {
                continue;
            }
            if !at(x, y - 1) {
                add((x, y), (x + 1, y));
            }
            if !at(x + 1, y) {
                add((x + 1, y), (x + 1, y + 1));
            }
            if !at(x, y + 1) {
                add((x + 1, y + 1), (x, y + 1));
            }
            if !at(x - 1, y) {
                add((x, y + 1), (x, y));
            }
        }
    }

    let mut rings = Vec::new();
    let cross = |d0: (i64, i64), d1: (i64, i64)| d0.0 * d1.1 - d0.1 * d1.0;
    for start in 0..outgoing.len() {
        while let Some(first) = outgoing[start][0].or(outgoing[start][1]) {
            let sx = (start as i64) % stride;
            let sy = (start as i64) / stride;
            take(&mut outgoing[start], first);
            let mut ring = vec![(sx, sy)];
            let mut prev = (sx, sy);
            let mut cur = first;
            while cur != (sx, sy) {
                ring.push(cur);
                let slot = &mut outgoing[key(cur.0, cur.1)];
                let dir_in = (cur.0 - prev.0, cur.1 - prev.1);
                let next = match (slot[0], slot[1]) {
                    (Some(a), Some(b)) => {
                        let ca = cross(dir_in, (a.0 - cur.0, a.1 - cur.1));
                        let cb = cross(dir_in, (b.0 - cur.0, b.1 - cur.1));
                        if ca >= cb {
                            a
                        } else {
                            b
                        }
                    }
                    (Some(a), None) | (None, Some(a)) => a,
                    (None, None) => unreachable!("open boundary chain"),
                };
                take(slot, next);
                prev = cur;
                cur = next;
            }
            let ring: Vec<Point> = ring.into_iter().map(Point::from).collect();
            rings.push(merge_collinear(&ring));
        }
    }
    rings
}

fn take(slot: &mut [Option<(i64, i64)>; 2], edge: (i64, i64)) {
    if slot[0] == Some(edge) {
        slot[0] = slot[1].take();
    } else {
        slot[1] = None;
    }
}

/// True when some lattice vertex has exactly two diagonally opposite filled
/// cells around it.
pub fn has_pinch(width: usize, height: usize, filled: impl Fn(usize, usize) -> bool) -> bool {
    let at = |x: i64, y: i64| -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < width
            && (y as usize) < height
            && filled(x as usize, y as usize)
    };
    for y in 0..=height as i64 {
        for x in 0..=width as i64 {
            let sw = at(x - 1, y - 1);
            let se = at(x, y - 1);
            let nw = at(x - 1, y);
            let ne = at(x, y);
            if (sw && ne && !se && !nw) || (se && nw && !sw && !ne) {
                return true;
            }
        }
    }
    false
}
