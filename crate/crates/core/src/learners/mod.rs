//! Classifiers operating on (possibly expanded) feature vectors.
//!
//! All learners are binary with labels in {+1, -1}; a raw score of exactly
//! zero maps to +1.

mod knn;
mod linear;
mod smo;
mod tree;
mod tune;

pub use knn::{train_knn, NeighborModel};
pub use linear::{primal_objective, train_linear_svm, LinearModel, LinearProblem, LinearOptions, LinearTrace};
pub use smo::{
    dual_objective, gaussian_gram, kkt_residuals, solve_smo, train_kernel_svm, KernelModel,
    SmoOptions, SmoSolution,
};
pub use tree::{train_tree, Node, TreeModel, TreeOptions};
pub use tune::{cv_accuracy, tune_linear_c, tune_svm, tune_tree_depth};

use ndarray::ArrayView2;

use crate::error::{Error, Result};

pub trait Classifier {
    /// Raw discriminant value; its sign is the predicted class.
    fn decision(&self, x: &[f64]) -> f64;

    fn input_dim(&self) -> usize;

    fn predict(&self, x: &[f64]) -> f64 {
        sign(self.decision(x))
    }
}

pub fn sign(score: f64) -> f64 {
    if score >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// (raw score, class) with a dimension check.
pub fn predict_discriminant<C: Classifier + ?Sized>(model: &C, x: &[f64]) -> Result<(f64, f64)> {
    if x.len() != model.input_dim() {
        return Err(Error::DimensionMismatch {
            expected: model.input_dim(),
            found: x.len(),
        });
    }
    let raw = model.decision(x);
    Ok((raw, sign(raw)))
}

/// Fraction of rows whose predicted class matches `y`.
pub fn accuracy<C: Classifier + Sync + ?Sized>(model: &C, z: ArrayView2<f64>, y: &[f64]) -> f64 {
    if y.is_empty() {
        return f64::NAN;
    }
    let hits: Vec<bool> = par_range_map!(0..y.len(), |i| {
        let row: Vec<f64> = z.row(i).iter().copied().collect();
        model.predict(&row) == y[i]
    });
    hits.iter().filter(|&&h| h).count() as f64 / y.len() as f64
}

pub(crate) fn check_labels(y: &[f64]) -> Result<()> {
    if let Some(bad) = y.iter().find(|&&v| v != 1.0 && v != -1.0) {
        return Err(Error::InvalidParameter(format!("labels must be +1/-1, got {bad}")));
    }
    let pos = y.iter().any(|&v| v > 0.0);
    let neg = y.iter().any(|&v| v < 0.0);
    if !(pos && neg) {
        return Err(Error::SingleClass);
    }
    Ok(())
}

/// +1 -> class 0, -1 -> class 1; used for stratifying inner folds.
pub(crate) fn class_ids(y: &[f64]) -> Vec<usize> {
    y.iter().map(|&v| usize::from(v < 0.0)).collect()
}
