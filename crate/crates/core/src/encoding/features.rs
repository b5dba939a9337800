use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::density::DensityMap;
use crate::error::{Error, Result};
use crate::grid::PixelRect;
use crate::labeling::{modal_label, RegionLabels};
use crate::partition::UnitRegionPartition;

/// Dense per-pixel feature vectors, channels contiguous per pixel.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseFeatureMap {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub data: Vec<f32>,
}

impl DenseFeatureMap {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<f32>) -> Result<Self> {
        if data.len() != width * height * channels {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a {width}x{height}x{channels} feature map",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "feature map holds non-finite values".into(),
            ));
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    pub fn pixel(&self, x: usize, y: usize) -> &[f32] {
        let i = (y * self.width + x) * self.channels;
        &self.data[i..i + self.channels]
    }
}

/// `N × m` matrix of region features, row `i` belonging to region `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionFeatures {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl RegionFeatures {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch("ragged feature rows".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.rows).map(|i| self.row(i))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reducer {
    #[default]
    Mean,
    Max,
}

/// Reduces the feature map over each region's (possibly irregular) pixel set.
pub fn region_pool(
    fmap: &DenseFeatureMap,
    p: &UnitRegionPartition,
    reducer: Reducer,
) -> Result<RegionFeatures> {
    if fmap.width != p.width() || fmap.height != p.height() {
        return Err(Error::ShapeMismatch(format!(
            "feature map {}x{} vs partition {}x{}",
            fmap.width,
            fmap.height,
            p.width(),
            p.height()
        )));
    }
    let m = fmap.channels;
    let mut data = Vec::with_capacity(p.len() * m);
    for region in &p.regions {
        if region.pixels.is_empty() {
            return Err(Error::EmptyRegion(region.id));
        }
        let mut acc = match reducer {
            Reducer::Mean => vec![0.0f64; m],
            Reducer::Max => vec![f64::NEG_INFINITY; m],
        };
        for &(x, y) in &region.pixels {
            for (a, &v) in acc.iter_mut().zip(fmap.pixel(x, y)) {
                match reducer {
                    Reducer::Mean => *a += v as f64,
                    Reducer::Max => *a = a.max(v as f64),
                }
            }
        }
        if reducer == Reducer::Mean {
            let n = region.pixels.len() as f64;
            acc.iter_mut().for_each(|a| *a /= n);
        }
        data.extend(acc);
    }
    Ok(RegionFeatures {
        rows: p.len(),
        cols: m,
        data,
    })
}

/// Affine layer; `weight` is `out × in`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub weight: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

impl Layer {
    pub fn identity(n: usize) -> Self {
        Self {
            weight: (0..n)
                .map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect())
                .collect(),
            bias: vec![0.0; n],
        }
    }

    pub fn inputs(&self) -> usize {
        self.weight.first().map_or(0, Vec::len)
    }

    pub fn outputs(&self) -> usize {
        self.weight.len()
    }
}

/// Glorot-uniform weights and zero biases for a `dims[0] → … → dims[k]`
/// stack, drawn from a ChaCha8 stream seeded with `seed`.
pub fn init_layers(seed: u64, dims: &[usize]) -> Vec<Layer> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    dims.windows(2)
        .map(|pair| {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            Layer {
                weight: (0..fan_out)
                    .map(|_| {
                        (0..fan_in)
                            .map(|_| rng.random_range(-limit..=limit))
                            .collect()
                    })
                    .collect(),
                bias: vec![0.0; fan_out],
            }
        })
        .collect()
}

/// Applies the same affine stack to every row, with ReLU between layers (the
/// last layer stays linear).
pub fn shared_transform(r: &RegionFeatures, layers: &[Layer]) -> Result<RegionFeatures> {
    let mut width = r.cols;
    for (i, layer) in layers.iter().enumerate() {
        if layer.inputs() != width
            || layer.bias.len() != layer.outputs()
            || layer.weight.iter().any(|w| w.len() != width)
        {
            return Err(Error::ShapeMismatch(format!(
                "layer {i} expects {} inputs and has {} biases, got width {width}",
                layer.inputs(),
                layer.bias.len()
            )));
        }
        width = layer.outputs();
    }
    let mut data = Vec::with_capacity(r.rows * width);
    for row in r.iter_rows() {
        let mut cur = row.to_vec();
        for (i, layer) in layers.iter().enumerate() {
            let last = i + 1 == layers.len();
            cur = layer
                .weight
                .iter()
                .zip(&layer.bias)
                .map(|(w, b)| {
                    let v = w.iter().zip(&cur).map(|(a, x)| a * x).sum::<f64>() + b;
                    if last {
                        v
                    } else {
                        v.max(0.0)
                    }
                })
                .collect();
        }
        data.extend(cur);
    }
    Ok(RegionFeatures {
        rows: r.rows,
        cols: width,
        data,
    })
}

pub const GEOMETRIC_FEATURE_NAMES: [&str; 7] = [
    "area_m2",
    "bbox_w_m",
    "bbox_h_m",
    "centroid_x",
    "centroid_y",
    "mean_density",
    "density_key",
];

/// Hand-built region descriptors: area, bbox size, centroid relative to the
/// plan's interior bbox, mean density, modal raw density sum and, when
/// labels are given, a one-hot class block of width `classes`.
pub fn geometric_features(
    p: &UnitRegionPartition,
    d: &DensityMap,
    labels: Option<(&RegionLabels, usize)>,
) -> RegionFeatures {
    let mpp = p.meters_per_pixel;
    let plan_box = p
        .regions
        .iter()
        .map(|r| r.bbox)
        .reduce(|mut a, b| {
            a.include(b.x0, b.y0);
            a.include(b.x1 - 1, b.y1 - 1);
            a
        })
        .unwrap_or(PixelRect::point(0, 0));
    let classes = labels.map_or(0, |(_, c)| c);
    let mut rows = Vec::with_capacity(p.len());
    for (i, r) in p.regions.iter().enumerate() {
        let n = r.pixels.len() as f64;
        let (sx, sy) = r.pixels.iter().fold((0.0, 0.0), |(sx, sy), &(x, y)| {
            (sx + x as f64 + 0.5, sy + y as f64 + 0.5)
        });
        let cx = (sx / n - plan_box.x0 as f64) / plan_box.width() as f64;
        let cy = (sy / n - plan_box.y0 as f64) / plan_box.height() as f64;
        let mean_density = r
            .pixels
            .iter()
            .map(|&(x, y)| *d.values.get(x, y))
            .sum::<f64>()
            / n;
        let key = modal_label(r.pixels.iter().map(|&(x, y)| *d.raw_sums.get(x, y) as i32));
        let mut row = vec![
            n * mpp * mpp,
            r.bbox.width() as f64 * mpp,
            r.bbox.height() as f64 * mpp,
            cx,
            cy,
            mean_density,
            key as f64,
        ];
        if let Some((labels, _)) = labels {
            let mut onehot = vec![0.0; classes];
            if let Some(slot) = usize::try_from(labels.0[i])
                .ok()
                .and_then(|l| onehot.get_mut(l))
            {
                *slot = 1.0;
            }
            row.extend(onehot);
        }
        rows.push(row);
    }
    let cols = GEOMETRIC_FEATURE_NAMES.len() + classes;
    RegionFeatures {
        rows: rows.len(),
        cols,
        data: rows.concat(),
    }
}

/// Per-column min-max scaling to `[0, 1]`; constant columns become 0.
pub fn normalize_features(r: &RegionFeatures) -> RegionFeatures {
    let mut out = r.clone();
    for c in 0..r.cols {
        let (lo, hi) = r
            .iter_rows()
            .map(|row| row[c])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            });
        let span = hi - lo;
        for i in 0..r.rows {
            let v = &mut out.data[i * r.cols + c];
            *v = if span > 0.0 { (*v - lo) / span } else { 0.0 };
        }
    }
    out
}
