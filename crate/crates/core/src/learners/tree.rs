//! Univariate decision tree grown greedily on a separability criterion: a
//! split scores the number of pairs of differently-labelled training
//! vectors it puts on opposite sides.

use ndarray::ArrayView2;

use super::Classifier;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct TreeOptions {
    pub max_depth: usize,
    pub min_leaf: usize,
}

impl Default for TreeOptions {
    fn default() -> Self {
        TreeOptions {
            max_depth: 12,
            min_leaf: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Leaf {
        label: f64,
        count: usize,
    },
    /// Rows with `x[feature] <= threshold` go left. The threshold is the
    /// largest training value on the left, so splits survive any increasing
    /// per-feature transform.
    Split {
        feature: usize,
        threshold: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

impl Node {
    pub fn depth(&self) -> usize {
        match self {
            Node::Leaf { .. } => 0,
            Node::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn leaves(&self) -> usize {
        match self {
            Node::Leaf { .. } => 1,
            Node::Split { left, right, .. } => left.leaves() + right.leaves(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TreeModel {
    pub root: Node,
    pub input_dim: usize,
    pub options: TreeOptions,
}

impl Classifier for TreeModel {
    fn decision(&self, x: &[f64]) -> f64 {
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf { label, .. } => return *label,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if x[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }

    fn input_dim(&self) -> usize {
        self.input_dim
    }
}

struct Builder<'a, 'b> {
    z: ArrayView2<'b, f64>,
    y: &'a [f64],
    options: &'a TreeOptions,
}

struct Candidate {
    score: u64,
    feature: usize,
    threshold: f64,
}

impl Builder<'_, '_> {
    fn leaf(&self, idx: &[usize]) -> Node {
        let pos = idx.iter().filter(|&&i| self.y[i] > 0.0).count();
        let label = if 2 * pos >= idx.len() { 1.0 } else { -1.0 };
        Node::Leaf {
            label,
            count: idx.len(),
        }
    }

    fn best_split_on(&self, idx: &[usize], feature: usize) -> Option<Candidate> {
        let min_leaf = self.options.min_leaf.max(1);
        let mut order: Vec<(f64, f64)> = idx
            .iter()
            .map(|&i| (self.z[(i, feature)], self.y[i]))
            .collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0));
        let total_pos = order.iter().filter(|p| p.1 > 0.0).count() as u64;
        let total_neg = order.len() as u64 - total_pos;
        let (mut lp, mut ln) = (0u64, 0u64);
        let mut best: Option<Candidate> = None;
        for s in 0..order.len() - 1 {
            if order[s].1 > 0.0 {
                lp += 1;
            } else {
                ln += 1;
            }
            if order[s].0 == order[s + 1].0 {
                continue;
            }
            let left = s + 1;
            if left < min_leaf || order.len() - left < min_leaf {
                continue;
            }
            let (rp, rn) = (total_pos - lp, total_neg - ln);
            let score = lp * rn + ln * rp;
            if best.as_ref().map_or(true, |b| score > b.score) {
                best = Some(Candidate {
                    score,
                    feature,
                    threshold: order[s].0,
                });
            }
        }
        best
    }

    fn grow(&self, idx: &[usize], depth: usize) -> Node {
        let pos = idx.iter().filter(|&&i| self.y[i] > 0.0).count();
        let pure = pos == 0 || pos == idx.len();
        if pure || depth >= self.options.max_depth || idx.len() < 2 * self.options.min_leaf.max(1) {
            return self.leaf(idx);
        }
        let candidates: Vec<Option<Candidate>> =
            par_range_map!(0..self.z.ncols(), |f| self.best_split_on(idx, f));
        let mut best: Option<Candidate> = None;
        for c in candidates.into_iter().flatten() {
            if best.as_ref().map_or(true, |b| c.score > b.score) {
                best = Some(c);
            }
        }
        let Some(best) = best.filter(|b| b.score > 0) else {
            return self.leaf(idx);
        };
        let (left, right): (Vec<usize>, Vec<usize>) = idx
            .iter()
            .partition(|&&i| self.z[(i, best.feature)] <= best.threshold);
        Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left: Box::new(self.grow(&left, depth + 1)),
            right: Box::new(self.grow(&right, depth + 1)),
        }
    }
}

pub fn train_tree(z: ArrayView2<f64>, y: &[f64], options: &TreeOptions) -> Result<TreeModel> {
    if z.nrows() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: z.nrows(),
            found: y.len(),
        });
    }
    if y.is_empty() {
        return Err(Error::Empty("tree training set".into()));
    }
    if let Some(bad) = y.iter().find(|&&v| v != 1.0 && v != -1.0) {
        return Err(Error::InvalidParameter(format!("labels must be +1/-1, got {bad}")));
    }
    let builder = Builder { z, y, options };
    let idx: Vec<usize> = (0..y.len()).collect();
    Ok(TreeModel {
        root: builder.grow(&idx, 0),
        input_dim: z.ncols(),
        options: options.clone(),
    })
}
