use serde::{Deserialize, Serialize};

use super::RegionFeatures;
use crate::error::{Error, Result};

/// Order-independent plan descriptor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Embedding(pub Vec<f64>);

impl Embedding {
    pub fn distance(&self, other: &Embedding) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// Channel-wise maximum over all region rows.
pub fn embed(r: &RegionFeatures) -> Result<Embedding> {
    if r.rows == 0 {
        return Err(Error::EmptyFeatureSet);
    }
    let mut out = r.row(0).to_vec();
    for row in r.iter_rows().skip(1) {
        for (o, &v) in out.iter_mut().zip(row) {
            *o = o.max(v);
        }
    }
    Ok(Embedding(out))
}

/// Percentage of triplets whose anchor is strictly closer to the positive
/// than to the negative. Ties count as failures.
pub fn triplet_accuracy(
    anchors: &[Embedding],
    positives: &[Embedding],
    negatives: &[Embedding],
) -> Result<f64> {
    if anchors.len() != positives.len() || anchors.len() != negatives.len() {
        return Err(Error::LengthMismatch(format!(
            "{} anchors, {} positives, {} negatives",
            anchors.len(),
            positives.len(),
            negatives.len()
        )));
    }
    if anchors.is_empty() {
        return Ok(0.0);
    }
    let mut correct = 0usize;
    for ((a, p), n) in anchors.iter().zip(positives).zip(negatives) {
        if a.0.len() != p.0.len() || a.0.len() != n.0.len() {
            return Err(Error::LengthMismatch("embedding widths differ".into()));
        }
        correct += usize::from(a.distance(p) < a.distance(n));
    }
    Ok(correct as f64 / anchors.len() as f64 * 100.0)
}
