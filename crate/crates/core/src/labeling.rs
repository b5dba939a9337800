//! Pixel label maps and region-level label voting.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::partition::UnitRegionPartition;

/// Room classes used by the synthetic corpus.
pub const DEFAULT_CLASSES: [&str; 8] = [
    "living", "bedroom", "kitchen", "bathroom", "dining", "study", "storage", "balcony",
];

pub fn default_class_names() -> Vec<String> {
    DEFAULT_CLASSES.iter().map(|s| s.to_string()).collect()
}

/// Per-pixel class ids; -1 marks pixels outside the interior.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelMap {
    pub labels: Grid<i32>,
    pub class_names: Vec<String>,
}

impl LabelMap {
    pub fn new(labels: Grid<i32>, class_names: Vec<String>) -> Self {
        Self {
            labels,
            class_names,
        }
    }

    pub fn width(&self) -> usize {
        self.labels.width()
    }

    pub fn height(&self) -> usize {
        self.labels.height()
    }

    pub fn class_count(&self) -> usize {
        self.class_names.len()
    }

    pub fn is_valid(&self) -> bool {
        let c = self.class_names.len() as i32;
        self.labels
            .as_slice()
            .iter()
            .all(|&l| l == -1 || (0..c).contains(&l))
    }
}

/// One class id per unit region, aligned with partition ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionLabels(pub Vec<i32>);

fn check_shape(a: &Grid<i32>, b: &Grid<i32>) -> Result<()> {
    if a.same_shape(b) {
        Ok(())
    } else {
        Err(Error::ShapeMismatch(format!(
            "{}x{} vs {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )))
    }
}

/// Most frequent non-negative value; ties go to the lowest id, -1 when there
/// are no votes.
pub fn modal_label(votes: impl IntoIterator<Item = i32>) -> i32 {
    let mut counts: Vec<u32> = Vec::new();
    for v in votes {
        if v < 0 {
            continue;
        }
        let v = v as usize;
        if v >= counts.len() {
            counts.resize(v + 1, 0);
        }
        counts[v] += 1;
    }
    let mut best = -1;
    let mut best_count = 0;
    for (class, &c) in counts.iter().enumerate() {
        if c > best_count {
            best = class as i32;
            best_count = c;
        }
    }
    best
}

/// Labels each region with the modal ground-truth class of its pixels and
/// expands the result back to a pixel map.
pub fn vote_labels(p: &UnitRegionPartition, gt: &LabelMap) -> Result<(RegionLabels, LabelMap)> {
    check_shape(&p.region_id_grid, &gt.labels)?;
    let labels = RegionLabels(
        p.regions
            .iter()
            .map(|r| modal_label(r.pixels.iter().map(|&(x, y)| *gt.labels.get(x, y))))
            .collect(),
    );
    let expanded = expand_labels(p, &labels, &gt.class_names);
    Ok((labels, expanded))
}

pub fn expand_labels(
    p: &UnitRegionPartition,
    labels: &RegionLabels,
    class_names: &[String],
) -> LabelMap {
    let grid = p
        .region_id_grid
        .map(|&id| if id < 0 { -1 } else { labels.0[id as usize] });
    LabelMap::new(grid, class_names.to_vec())
}

/// Fraction of labeled ground-truth pixels whose prediction agrees.
pub fn pixel_accuracy(pred: &LabelMap, gt: &LabelMap) -> Result<f64> {
    check_shape(&pred.labels, &gt.labels)?;
    let mut total = 0usize;
    let mut hit = 0usize;
    for (&p, &g) in pred.labels.as_slice().iter().zip(gt.labels.as_slice()) {
        if g >= 0 {
            total += 1;
            hit += usize::from(p == g);
        }
    }
    Ok(if total == 0 {
        1.0
    } else {
        hit as f64 / total as f64
    })
}

/// Shifts room boundaries `shift` pixels east and north: each labeled pixel
/// copies the label found `shift` pixels to its south-west when that pixel is
/// labeled too, and keeps its own otherwise.
pub fn perturb_labels(gt: &LabelMap, shift: usize) -> LabelMap {
    let g = &gt.labels;
    let grid = Grid::from_fn(g.width(), g.height(), |x, y| {
        let own = *g.get(x, y);
        if own < 0 || x < shift || y < shift {
            return own;
        }
        let src = *g.get(x - shift, y - shift);
        if src >= 0 {
            src
        } else {
            own
        }
    });
    LabelMap::new(grid, gt.class_names.clone())
}
