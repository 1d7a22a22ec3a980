use std::ops::RangeInclusive;

use ndarray::{Array2, ArrayView2, Axis};

use super::{check_labels, class_ids, Classifier};
use crate::dataset::stratified_folds;
use crate::error::{Error, Result};
use crate::stats::squared_distance;

/// Majority vote of the `k` nearest stored vectors (Euclidean distance,
/// ties in distance broken by training index, ties in the vote go to +1).
#[derive(Clone, Debug, PartialEq)]
pub struct NeighborModel {
    pub points: Array2<f64>,
    pub labels: Vec<f64>,
    pub k: usize,
}

impl NeighborModel {
    pub fn new(points: Array2<f64>, labels: Vec<f64>, k: usize) -> Result<NeighborModel> {
        if k == 0 || k > labels.len() {
            return Err(Error::InvalidParameter(format!(
                "k must be in [1, {}], got {k}",
                labels.len()
            )));
        }
        if points.nrows() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: points.nrows(),
                found: labels.len(),
            });
        }
        Ok(NeighborModel { points, labels, k })
    }
}

/// Training indices sorted by (distance, index), truncated to `k`.
fn nearest(points: ArrayView2<f64>, x: &[f64], k: usize) -> Vec<usize> {
    let mut d: Vec<(f64, usize)> = points
        .rows()
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            let d = match r.as_slice() {
                Some(s) => squared_distance(s, x),
                None => r.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum(),
            };
            (d, i)
        })
        .collect();
    let k = k.min(d.len());
    let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < d.len() {
        d.select_nth_unstable_by(k, cmp);
        d.truncate(k);
    }
    d.sort_by(cmp);
    d.into_iter().map(|(_, i)| i).collect()
}

impl Classifier for NeighborModel {
    /// Sum of neighbor labels: positive when +1 neighbors are the majority.
    fn decision(&self, x: &[f64]) -> f64 {
        nearest(self.points.view(), x, self.k)
            .into_iter()
            .map(|i| self.labels[i])
            .sum()
    }

    fn input_dim(&self) -> usize {
        self.points.ncols()
    }
}

/// Choose `k` from `k_range` by stratified inner cross-validation (ties go to
/// the smaller k) and store all training data.
pub fn train_knn(
    z: ArrayView2<f64>,
    y: &[f64],
    k_range: RangeInclusive<usize>,
    inner_folds: usize,
    seed: u64,
) -> Result<NeighborModel> {
    let m = y.len();
    if k_range.is_empty() || *k_range.start() == 0 {
        return Err(Error::InvalidParameter(format!(
            "invalid k range {k_range:?}"
        )));
    }
    if m <= inner_folds {
        return Err(Error::InvalidParameter(format!(
            "{m} samples is too few for {inner_folds} inner folds"
        )));
    }
    check_labels(y)?;
    let k_max = *k_range.end();
    let plan = stratified_folds(&class_ids(y), 2, inner_folds, seed)?;

    let per_fold: Vec<Vec<usize>> = par_range_map!(0..inner_folds, |f| {
        let (train, test) = plan.split(f);
        let pts = z.select(Axis(0), &train);
        let mut correct = vec![0usize; k_max + 1];
        for &t in &test {
            let x: Vec<f64> = z.row(t).to_vec();
            let mut votes = 0.0;
            for (rank, i) in nearest(pts.view(), &x, k_max).into_iter().enumerate() {
                votes += y[train[i]];
                let pred = if votes >= 0.0 { 1.0 } else { -1.0 };
                if pred == y[t] {
                    correct[rank + 1] += 1;
                }
            }
        }
        correct
    });

    let mut best_k = *k_range.start();
    let mut best = 0usize;
    for k in k_range.clone() {
        let c: usize = per_fold.iter().map(|v| v.get(k).copied().unwrap_or(0)).sum();
        if c > best {
            best = c;
            best_k = k;
        }
    }
    NeighborModel::new(z.to_owned(), y.to_vec(), best_k.min(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::generate_parity;
    use crate::learners::accuracy;
    use ndarray::array;

    #[test]
    fn one_nn_recovers_training_labels() {
        let z = array![[0.0, 0.0], [1.0, 0.0], [5.0, 5.0], [6.0, 5.0]];
        let y = vec![1.0, 1.0, -1.0, -1.0];
        let model = NeighborModel::new(z.clone(), y.clone(), 1).unwrap();
        assert_eq!(accuracy(&model, z.view(), &y), 1.0);
        assert_eq!(model.predict(&[1.0, 0.0]), 1.0);
    }

    #[test]
    fn single_point_per_class_behaves_like_nearest_centroid() {
        let z = array![[0.0], [10.0]];
        let model = NeighborModel::new(z, vec![1.0, -1.0], 1).unwrap();
        assert_eq!(model.predict(&[4.9]), 1.0);
        assert_eq!(model.predict(&[5.1]), -1.0);
    }

    #[test]
    fn parity_needs_more_than_two_n_neighbors() {
        let p = generate_parity(8).unwrap();
        let y = p.signed_labels();
        let model = train_knn(p.samples.view(), &y, 1..=20, 10, 1).unwrap();
        assert!(model.k > 16, "k = {}", model.k);
        assert_eq!(accuracy(&model, p.samples.view(), &y), 1.0);
    }

    #[test]
    fn errors() {
        let z = array![[0.0], [1.0], [2.0]];
        let y = [1.0, -1.0, 1.0];
        #[allow(clippy::reversed_empty_ranges)]
        let empty = 5..=4;
        assert!(train_knn(z.view(), &y, empty, 2, 0).is_err());
        assert!(train_knn(z.view(), &y, 1..=2, 3, 0).is_err());
        assert!(NeighborModel::new(z.to_owned(), y.to_vec(), 0).is_err());
    }
}
