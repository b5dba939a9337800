//! Segmentation metrics: per-class IoU and boundary F-score.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::labeling::LabelMap;
use crate::raster::RasterMask;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IouReport {
    /// IoU in percent per class; `None` for classes absent from both maps.
    pub per_class: Vec<Option<f64>>,
    /// Mean over the classes that are present, in percent.
    pub mean: f64,
}

/// Per-class intersection over union. Pixels labeled -1 in either map are
/// ignored.
pub fn iou(pred: &LabelMap, gt: &LabelMap, classes: usize) -> Result<IouReport> {
    if !pred.labels.same_shape(&gt.labels) {
        return Err(Error::ShapeMismatch(format!(
            "prediction {}x{} vs ground truth {}x{}",
            pred.width(),
            pred.height(),
            gt.width(),
            gt.height()
        )));
    }
    let mut inter = vec![0u64; classes];
    let mut union = vec![0u64; classes];
    for (&p, &g) in pred.labels.as_slice().iter().zip(gt.labels.as_slice()) {
        if p < 0 || g < 0 {
            continue;
        }
        let (p, g) = (p as usize, g as usize);
        if p == g {
            if p < classes {
                inter[p] += 1;
                union[p] += 1;
            }
        } else {
            if p < classes {
                union[p] += 1;
            }
            if g < classes {
                union[g] += 1;
            }
        }
    }
    let per_class: Vec<Option<f64>> = (0..classes)
        .map(|c| (union[c] > 0).then(|| inter[c] as f64 / union[c] as f64 * 100.0))
        .collect();
    let present: Vec<f64> = per_class.iter().flatten().copied().collect();
    let mean = if present.is_empty() {
        100.0
    } else {
        present.iter().sum::<f64>() / present.len() as f64
    };
    Ok(IouReport { per_class, mean })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryMode {
    All,
    /// Ignores boundary pixels near the plan outline.
    Internal,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryScore {
    pub precision: f64,
    pub recall: f64,
    pub f: f64,
}

/// Summed-area table with a one-cell zero border.
struct Integral {
    w: usize,
    h: usize,
    sums: Vec<u32>,
}

impl Integral {
    fn new(w: usize, h: usize, on: impl Fn(usize, usize) -> bool) -> Self {
        let stride = w + 1;
        let mut sums = vec![0u32; stride * (h + 1)];
        for y in 0..h {
            let mut row = 0u32;
            for x in 0..w {
                row += u32::from(on(x, y));
                sums[(y + 1) * stride + x + 1] = sums[y * stride + x + 1] + row;
            }
        }
        Self { w, h, sums }
    }

    /// Count inside the Chebyshev ball of radius `r` around `(x, y)`,
    /// clipped to the grid, plus whether the ball leaves the grid.
    fn ball(&self, x: usize, y: usize, r: usize) -> (u32, bool) {
        let x0 = x.saturating_sub(r);
        let y0 = y.saturating_sub(r);
        let x1 = (x + r + 1).min(self.w);
        let y1 = (y + r + 1).min(self.h);
        let clipped = x < r || y < r || x + r + 1 > self.w || y + r + 1 > self.h;
        let s = self.w + 1;
        let count = self.sums[y1 * s + x1] + self.sums[y0 * s + x0]
            - self.sums[y0 * s + x1]
            - self.sums[y1 * s + x0];
        (count, clipped)
    }
}

/// Boundary pixels of a label map.
///
/// Between two differently labeled interior pixels only the south/west one is
/// marked, so a straight internal boundary is one pixel thick. Interior pixels
/// next to the exterior (or the grid edge) are always marked.
pub fn boundary_pixels(map: &LabelMap) -> Grid<bool> {
    let l = &map.labels;
    Grid::from_fn(l.width(), l.height(), |x, y| {
        let own = *l.get(x, y);
        if own < 0 {
            return false;
        }
        let at = |dx: i64, dy: i64| {
            l.get_signed(x as i64 + dx, y as i64 + dy)
                .copied()
                .unwrap_or(-1)
        };
        let (e, n, w, s) = (at(1, 0), at(0, 1), at(-1, 0), at(0, -1));
        e != own || n != own || w < 0 || s < 0
    })
}

/// Boundary precision, recall and F-score with a Chebyshev distance tolerance.
///
/// In `Internal` mode boundary pixels within `tol_px` of the interior outline
/// (pixels whose Chebyshev distance to a non-interior pixel is at most
/// `tol_px + 1`) are dropped from both maps. Empty boundary sets score a
/// precision (or recall) of 1.
pub fn boundary_f(
    pred: &LabelMap,
    gt: &LabelMap,
    tol_px: usize,
    mode: BoundaryMode,
    outline: &RasterMask,
) -> Result<BoundaryScore> {
    if !pred.labels.same_shape(&gt.labels) || !pred.labels.same_shape(&outline.cells) {
        return Err(Error::ShapeMismatch("boundary maps differ in size".into()));
    }
    let (w, h) = (pred.width(), pred.height());
    let mut pb = boundary_pixels(pred);
    let mut gb = boundary_pixels(gt);
    if mode == BoundaryMode::Internal {
        let exterior = Integral::new(w, h, |x, y| !outline.is_interior(x, y));
        for y in 0..h {
            for x in 0..w {
                let (count, clipped) = exterior.ball(x, y, tol_px + 1);
                if count > 0 || clipped {
                    pb.set(x, y, false);
                    gb.set(x, y, false);
                }
            }
        }
    }
    let matched_fraction = |from: &Grid<bool>, to: &Grid<bool>| -> f64 {
        let index = Integral::new(w, h, |x, y| *to.get(x, y));
        let mut total = 0usize;
        let mut hit = 0usize;
        for y in 0..h {
            for x in 0..w {
                if *from.get(x, y) {
                    total += 1;
                    hit += usize::from(index.ball(x, y, tol_px).0 > 0);
                }
            }
        }
        if total == 0 {
            1.0
        } else {
            hit as f64 / total as f64
        }
    };
    let precision = matched_fraction(&pb, &gb);
    let recall = matched_fraction(&gb, &pb);
    let f = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(BoundaryScore {
        precision,
        recall,
        f,
    })
}
