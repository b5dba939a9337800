use serde::{Deserialize, Serialize};

use super::RegionFeatures;
use crate::error::{Error, Result};
use crate::labeling::{modal_label, RegionLabels};
use crate::union_find::UnionFind;

/// Pairwise Euclidean distances between region features.
#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityMatrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl SimilarityMatrix {
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Upper-triangle entries, row by row.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| (i + 1..self.n).map(move |j| (i, j, self.get(i, j))))
    }
}

pub fn pairwise_distance(r: &RegionFeatures) -> SimilarityMatrix {
    let n = r.rows;
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = r
                .row(i)
                .iter()
                .zip(r.row(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            data[i * n + j] = d;
            data[j * n + i] = d;
        }
    }
    SimilarityMatrix { n, data }
}

/// Connected components of the graph joining regions closer than
/// `threshold`. Instance ids are dense and ordered by smallest member.
pub fn group_instances(s: &SimilarityMatrix, threshold: f64) -> Vec<usize> {
    let mut uf = UnionFind::new(s.n);
    for (i, j, d) in s.edges() {
        if d < threshold {
            uf.union(i, j);
        }
    }
    uf.labels().0
}

/// Midpoint of the widest gap between consecutive distinct edge weights.
///
/// With fewer than two distinct weights there is no gap: all-zero distances
/// give a threshold that merges everything, otherwise 0 (all singletons).
pub fn auto_threshold(s: &SimilarityMatrix) -> f64 {
    let mut weights: Vec<f64> = s.edges().map(|(_, _, d)| d).collect();
    weights.sort_by(f64::total_cmp);
    weights.dedup();
    if weights.len() < 2 {
        return if weights.first() == Some(&0.0) {
            f64::MIN_POSITIVE
        } else {
            0.0
        };
    }
    let mut best = (f64::NEG_INFINITY, 0.0);
    for pair in weights.windows(2) {
        let gap = pair[1] - pair[0];
        if gap > best.0 {
            best = (gap, (pair[0] + pair[1]) / 2.0);
        }
    }
    best.1
}

/// Modal region label per instance, lowest id on ties.
pub fn vote_room_type(instances: &[usize], labels: &RegionLabels) -> Result<Vec<i32>> {
    if instances.len() != labels.0.len() {
        return Err(Error::LengthMismatch(format!(
            "{} instance ids for {} region labels",
            instances.len(),
            labels.0.len()
        )));
    }
    let count = instances.iter().max().map_or(0, |&m| m + 1);
    let mut members: Vec<Vec<i32>> = vec![Vec::new(); count];
    for (&inst, &label) in instances.iter().zip(&labels.0) {
        members[inst].push(label);
    }
    Ok(members.into_iter().map(modal_label).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceGrouping {
    pub threshold: f64,
    pub instance_of: Vec<usize>,
    pub room_labels: Vec<i32>,
}

/// Groups regions into room instances and votes each instance's type.
/// Without an explicit threshold the widest-gap rule picks one.
pub fn group_rooms(
    features: &RegionFeatures,
    labels: &RegionLabels,
    threshold: Option<f64>,
) -> Result<InstanceGrouping> {
    let s = pairwise_distance(features);
    let threshold = threshold.unwrap_or_else(|| auto_threshold(&s));
    let instance_of = group_instances(&s, threshold);
    let room_labels = vote_room_type(&instance_of, labels)?;
    Ok(InstanceGrouping {
        threshold,
        instance_of,
        room_labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distances_of_unit_vectors() {
        let r = RegionFeatures::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let s = pairwise_distance(&r);
        assert_eq!(s.get(0, 0), 0.0);
        assert_eq!(s.get(0, 1), 2f64.sqrt());
        assert_eq!(s.get(1, 0), 2f64.sqrt());
        let same = RegionFeatures::from_rows(&vec![vec![3.0, 1.0]; 4]).unwrap();
        assert!(pairwise_distance(&same).data.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn threshold_extremes() {
        let r = RegionFeatures::from_rows(&[vec![0.0], vec![1.0], vec![5.0]]).unwrap();
        let s = pairwise_distance(&r);
        assert_eq!(group_instances(&s, 0.0), vec![0, 1, 2]);
        assert_eq!(group_instances(&s, 5.1), vec![0, 0, 0]);
    }

    #[test]
    fn chain_closes_transitively() {
        // a-b and b-c are close, a-c is not.
        let r = RegionFeatures::from_rows(&[vec![0.0], vec![1.0], vec![2.0], vec![9.0]]).unwrap();
        let s = pairwise_distance(&r);
        assert!(s.get(0, 2) > 1.5);
        assert_eq!(group_instances(&s, 1.5), vec![0, 0, 0, 1]);
    }

    #[test]
    fn widest_gap_threshold() {
        let r = RegionFeatures::from_rows(&[vec![0.0], vec![0.5], vec![10.0], vec![10.4]]).unwrap();
        let s = pairwise_distance(&r);
        let t = auto_threshold(&s);
        assert_eq!(group_instances(&s, t), vec![0, 0, 1, 1]);
        let same = RegionFeatures::from_rows(&vec![vec![1.0]; 3]).unwrap();
        assert_eq!(
            group_instances(
                &pairwise_distance(&same),
                auto_threshold(&pairwise_distance(&same))
            ),
            vec![0, 0, 0]
        );
    }

    #[test]
    fn room_type_votes() {
        let labels = RegionLabels(vec![7, 2, 2, 5, 1, 3]);
        let inst = vec![0, 1, 1, 1, 2, 2];
        assert_eq!(vote_room_type(&inst, &labels).unwrap(), vec![7, 2, 1]);
        assert!(vote_room_type(&inst[..3], &labels).is_err());
    }
}
