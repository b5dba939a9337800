//! Synthetic floorplans: a base rectangle carved by random squeezes, with
//! ground-truth rooms assembled from the plan's own density regions.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::density::density_map;
use crate::floorplan::{Floorplan, Opening, OpeningKind, Room};
use crate::geometry::{self, Point};
use crate::labeling::DEFAULT_CLASSES;
use crate::partition::cluster_density_regions;
use crate::raster::{rasterize_with, RasterTransform};
use crate::squeeze::{squeeze, Side, SqueezeOp};
use crate::union_find::UnionFind;

/// Attempts per squeeze before the op count is reduced.
const RETRIES_PER_OP: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct SynthOptions {
    pub width: u32,
    pub height: u32,
    pub n_ops: usize,
    pub meters_per_pixel: f64,
    /// Squeeze coordinates are multiples of this; defaults to `min(w, h) / 16`.
    pub grain: Option<u32>,
    /// Chance that two adjacent density regions end up in the same room.
    pub merge_probability: f64,
    pub front_door: bool,
}

impl SynthOptions {
    pub fn square(size: u32, n_ops: usize) -> Self {
        Self {
            width: size,
            height: size,
            n_ops,
            meters_per_pixel: 0.2,
            grain: None,
            merge_probability: 0.5,
            front_door: true,
        }
    }

    fn grain(&self) -> u32 {
        self.grain
            .unwrap_or((self.width.min(self.height) / 16).max(1))
            .max(1)
    }
}

/// `synth_with(seed, &SynthOptions::square(base_size, n_ops))`.
pub fn synth_floorplan(seed: u64, n_ops: usize, base_size: u32) -> Floorplan {
    synth_with(seed, &SynthOptions::square(base_size, n_ops))
}

/// Deterministic for a fixed seed and options. Rejected random squeezes are
/// resampled; after [`RETRIES_PER_OP`] failures in a row the op count drops.
pub fn synth_with(seed: u64, opts: &SynthOptions) -> Floorplan {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut plan =
        Floorplan::rectangle(opts.width as f64, opts.height as f64, opts.meters_per_pixel);
    let grain = opts.grain() as i64;
    let mut target = opts.n_ops;
    let mut applied = 0;
    while applied < target {
        let mut done = false;
        for _ in 0..RETRIES_PER_OP {
            let op = random_op(&mut rng, &plan, grain);
            if let Some(next) = op.and_then(|op| squeeze(&plan, op).ok()) {
                plan = next;
                done = true;
                break;
            }
        }
        if done {
            applied += 1;
        } else {
            target -= 1;
        }
    }
    if opts.front_door {
        add_front_door(&mut rng, &mut plan, grain);
    }
    plan.gt_rooms = Some(synth_rooms(&mut rng, &plan, opts.merge_probability));
    plan
}

fn random_op(rng: &mut ChaCha8Rng, plan: &Floorplan, grain: i64) -> Option<SqueezeOp> {
    let side = Side::ALL[rng.random_range(0..4)];
    let bb = plan.bbox();
    let (w, h) = (bb.width() as i64 / grain, bb.height() as i64 / grain);
    let (len, across) = if side.runs_along_x() { (w, h) } else { (h, w) };
    if len < 2 || across < 2 {
        return None;
    }
    let start = rng.random_range(0..len - 1);
    let end = rng.random_range(start + 1..=len);
    let depth = rng.random_range(1..=(across / 2).max(1));
    Some(SqueezeOp {
        side,
        start: (start * grain) as u32,
        end: (end * grain) as u32,
        depth: (depth * grain) as u32,
    })
}

fn add_front_door(rng: &mut ChaCha8Rng, plan: &mut Floorplan, grain: i64) {
    let long: Vec<(Point, Point)> = plan
        .edges()
        .filter(|&(a, b)| a.dist(b) >= 2.0 * grain as f64)
        .collect();
    if long.is_empty() {
        return;
    }
    let (a, b) = long[rng.random_range(0..long.len())];
    let len = a.dist(b);
    let mid = (len / 2.0).floor();
    let half = (grain as f64 / 2.0).max(0.5).floor().max(1.0);
    let along = |t: f64| Point::new(a.x + (b.x - a.x) * t / len, a.y + (b.y - a.y) * t / len);
    plan.openings.push(Opening {
        a: along(mid - half),
        b: along(mid + half),
        kind: OpeningKind::FrontDoor,
        label: 3,
    });
}

/// Random connected unions of density regions on the plan's native lattice.
/// Unions that would not trace to a simple polygon absorb a neighbour until
/// they do.
fn synth_rooms(rng: &mut ChaCha8Rng, plan: &Floorplan, merge_probability: f64) -> Vec<Room> {
    let transform = RasterTransform::native(plan, 0);
    let raster = rasterize_with(plan, transform, false).expect("valid plan rasterizes");
    let regions =
        cluster_density_regions(&density_map(&raster.mask).expect("non-empty")).expect("non-empty");
    let ids = regions.id_grid();
    let (w, h) = (ids.width(), ids.height());

    let mut adjacency: Vec<(usize, usize)> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let a = *ids.get(x, y);
            if a < 0 {
                continue;
            }
            for (nx, ny) in [(x + 1, y), (x, y + 1)] {
                if nx < w && ny < h {
                    let b = *ids.get(nx, ny);
                    if b >= 0 && b != a {
                        adjacency.push((a.min(b) as usize, a.max(b) as usize));
                    }
                }
            }
        }
    }
    adjacency.sort_unstable();
    adjacency.dedup();

    let mut uf = UnionFind::new(regions.len());
    let mut order = adjacency.clone();
    order.shuffle(rng);
    for &(a, b) in &order {
        if rng.random_bool(merge_probability) {
            uf.union(a, b);
        }
    }

    let origin = plan.bbox().min;
    loop {
        let (room_of, count) = uf.labels();
        let room_cells = |room: usize| {
            let room_of = &room_of;
            let ids = &ids;
            move |x: usize, y: usize| {
                let id = *ids.get(x, y);
                id >= 0 && room_of[id as usize] == room
            }
        };
        let mut broken = None;
        let mut rings = Vec::with_capacity(count);
        for room in 0..count {
            let traced = geometry::trace_cells(w, h, room_cells(room));
            if traced.len() != 1 || geometry::has_pinch(w, h, room_cells(room)) {
                broken = Some(room);
                break;
            }
            rings.push(traced.into_iter().next().expect("one ring"));
        }
        if let Some(room) = broken {
            let neighbour = adjacency
                .iter()
                .find(|&&(a, b)| (room_of[a] == room) != (room_of[b] == room))
                .copied()
                .expect("a split room has a neighbour");
            uf.union(neighbour.0, neighbour.1);
            continue;
        }

        let mut room_adj = vec![Vec::new(); count];
        for &(a, b) in &adjacency {
            let (ra, rb) = (room_of[a], room_of[b]);
            if ra != rb {
                room_adj[ra].push(rb);
                room_adj[rb].push(ra);
            }
        }
        let mut labels: Vec<Option<u32>> = vec![None; count];
        for room in 0..count {
            let taken: Vec<u32> = room_adj[room].iter().filter_map(|&r| labels[r]).collect();
            let free: Vec<u32> = (0..DEFAULT_CLASSES.len() as u32)
                .filter(|l| !taken.contains(l))
                .collect();
            labels[room] = Some(if free.is_empty() {
                rng.random_range(0..DEFAULT_CLASSES.len() as u32)
            } else {
                free[rng.random_range(0..free.len())]
            });
        }
        return rings
            .into_iter()
            .zip(labels)
            .map(|(ring, label)| Room {
                polygon: ring
                    .into_iter()
                    .map(|p| Point::new(p.x + origin.x, p.y + origin.y))
                    .collect(),
                label: label.expect("labeled"),
            })
            .collect();
    }
}
