//! Gaussian-kernel SVM trained on the dual by sequential minimal
//! optimization with second-order working set selection.
//!
//! The dual is `max Σαᵢ - ½ ΣΣ αᵢαⱼyᵢyⱼK(xᵢ,xⱼ)` subject to `0 ≤ αᵢ ≤ C` and
//! `Σαᵢyᵢ = 0`. The solver works on the equivalent minimization of
//! `f(α) = ½αᵀQα - eᵀα` with `Qᵢⱼ = yᵢyⱼKᵢⱼ` and keeps the gradient
//! `G = Qα - e` up to date after every pair update.

use ndarray::{Array2, ArrayView2};

use super::{check_labels, Classifier};
use crate::error::{Error, Result};
use crate::stats::squared_distance;

const TAU: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct SmoOptions {
    /// Stop when the maximal KKT violation gap falls below this.
    pub tolerance: f64,
    /// Iteration cap; `None` means `max(100_000, 10·m²)`.
    pub max_iterations: Option<usize>,
}

impl Default for SmoOptions {
    fn default() -> Self {
        SmoOptions {
            tolerance: 1e-4,
            max_iterations: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmoSolution {
    pub alpha: Vec<f64>,
    /// Bias `b` of `g(x) = Σ αᵢyᵢK(x, xᵢ) + b`.
    pub bias: f64,
    pub iterations: usize,
    /// Final `m(α) - M(α)` violation gap.
    pub gap: f64,
    pub converged: bool,
}

/// `Σαᵢ - ½ ΣΣ αᵢαⱼyᵢyⱼKᵢⱼ`.
pub fn dual_objective(gram: ArrayView2<f64>, y: &[f64], alpha: &[f64]) -> f64 {
    let m = y.len();
    let mut quad = 0.0;
    for i in 0..m {
        if alpha[i] == 0.0 {
            continue;
        }
        for j in 0..m {
            quad += alpha[i] * alpha[j] * y[i] * y[j] * gram[(i, j)];
        }
    }
    alpha.iter().sum::<f64>() - 0.5 * quad
}

/// Per-point KKT residuals of a dual solution: `max(0, 1 - yg)` at the lower
/// bound, `max(0, yg - 1)` at the upper bound, `|yg - 1|` in between.
pub fn kkt_residuals(gram: ArrayView2<f64>, y: &[f64], alpha: &[f64], bias: f64, c: f64) -> Vec<f64> {
    let m = y.len();
    (0..m)
        .map(|i| {
            let g: f64 = (0..m).map(|j| alpha[j] * y[j] * gram[(i, j)]).sum::<f64>() + bias;
            let margin = y[i] * g;
            if alpha[i] <= 0.0 {
                (1.0 - margin).max(0.0)
            } else if alpha[i] >= c {
                (margin - 1.0).max(0.0)
            } else {
                (margin - 1.0).abs()
            }
        })
        .collect()
}

/// Solve the SVM dual for a precomputed Gram matrix.
pub fn solve_smo(gram: ArrayView2<f64>, y: &[f64], c: f64, options: &SmoOptions) -> Result<SmoSolution> {
    let m = y.len();
    if gram.nrows() != m || gram.ncols() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: gram.nrows(),
        });
    }
    check_labels(y)?;
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(format!("C must be > 0, got {c}")));
    }
    let max_iter = options
        .max_iterations
        .unwrap_or_else(|| (10 * m * m).max(100_000));

    let mut alpha = vec![0.0; m];
    let mut grad = vec![-1.0; m];
    let mut iterations = 0;
    let mut gap;

    let in_up = |a: f64, yt: f64| (yt > 0.0 && a < c) || (yt < 0.0 && a > 0.0);
    let in_low = |a: f64, yt: f64| (yt > 0.0 && a > 0.0) || (yt < 0.0 && a < c);

    loop {
        // i: maximal violator in I_up.
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = usize::MAX;
        for t in 0..m {
            if in_up(alpha[t], y[t]) {
                let v = -y[t] * grad[t];
                if v > gmax {
                    gmax = v;
                    i_sel = t;
                }
            }
        }
        let mut gmin = f64::INFINITY;
        let mut j_sel = usize::MAX;
        let mut best_gain = f64::INFINITY;
        if i_sel != usize::MAX {
            let kii = gram[(i_sel, i_sel)];
            for t in 0..m {
                if !in_low(alpha[t], y[t]) {
                    continue;
                }
                let v = -y[t] * grad[t];
                gmin = gmin.min(v);
                let b = gmax - v;
                if b > 0.0 {
                    let mut a = kii + gram[(t, t)] - 2.0 * gram[(i_sel, t)];
                    if a <= 0.0 {
                        a = TAU;
                    }
                    let gain = -(b * b) / a;
                    if gain < best_gain {
                        best_gain = gain;
                        j_sel = t;
                    }
                }
            }
        }
        gap = gmax - gmin;
        if i_sel == usize::MAX || j_sel == usize::MAX || gap < options.tolerance {
            break;
        }
        if iterations >= max_iter {
            let bias = compute_bias(&alpha, &grad, y, c);
            let best = SmoSolution {
                alpha,
                bias,
                iterations,
                gap,
                converged: false,
            };
            return Ok(best);
        }
        iterations += 1;

        let (i, j) = (i_sel, j_sel);
        let (old_i, old_j) = (alpha[i], alpha[j]);
        let kij = gram[(i, j)];
        if y[i] != y[j] {
            let mut quad = gram[(i, i)] + gram[(j, j)] + 2.0 * y[i] * y[j] * kij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let mut quad = gram[(i, i)] + gram[(j, j)] - 2.0 * kij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        alpha[i] = alpha[i].clamp(0.0, c);
        alpha[j] = alpha[j].clamp(0.0, c);

        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for (t, g) in grad.iter_mut().enumerate() {
            *g += y[t] * (y[i] * gram[(i, t)] * di + y[j] * gram[(j, t)] * dj);
        }
    }

    let bias = compute_bias(&alpha, &grad, y, c);
    Ok(SmoSolution {
        alpha,
        bias,
        iterations,
        gap,
        converged: true,
    })
}

/// Average of `-yᵢGᵢ` over free variables, or the midpoint of the feasible
/// interval when none are free.
fn compute_bias(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    let mut sum = 0.0;
    let mut free = 0usize;
    for t in 0..y.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            sum += yg;
        }
    }
    let rho = if free > 0 {
        sum / free as f64
    } else {
        (ub + lb) / 2.0
    };
    -rho
}

/// `exp(-β‖xᵢ - xⱼ‖²)` for all pairs of rows.
pub fn gaussian_gram(x: ArrayView2<f64>, beta: f64) -> Array2<f64> {
    let m = x.nrows();
    let rows: Vec<Vec<f64>> = x.rows().into_iter().map(|r| r.to_vec()).collect();
    let data: Vec<Vec<f64>> = par_range_map!(0..m, |i| {
        (0..m)
            .map(|j| (-beta * squared_distance(&rows[i], &rows[j])).exp())
            .collect::<Vec<f64>>()
    });
    Array2::from_shape_vec((m, m), data.into_iter().flatten().collect()).expect("square gram")
}

/// Support vectors with their dual coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelModel {
    pub support_vectors: Array2<f64>,
    /// αᵢ of each support vector, in (0, C].
    pub alphas: Vec<f64>,
    pub labels: Vec<f64>,
    pub bias: f64,
    pub beta: f64,
    pub c: f64,
}

impl Classifier for KernelModel {
    fn decision(&self, x: &[f64]) -> f64 {
        self.support_vectors
            .rows()
            .into_iter()
            .zip(self.alphas.iter().zip(&self.labels))
            .map(|(sv, (a, y))| {
                let d: f64 = sv.iter().zip(x).map(|(p, q)| (p - q) * (p - q)).sum();
                a * y * (-self.beta * d).exp()
            })
            .sum::<f64>()
            + self.bias
    }

    fn input_dim(&self) -> usize {
        self.support_vectors.ncols()
    }
}

impl KernelModel {
    fn from_solution(x: ArrayView2<f64>, y: &[f64], sol: &SmoSolution, beta: f64, c: f64) -> KernelModel {
        let idx: Vec<usize> = (0..y.len()).filter(|&i| sol.alpha[i] > 0.0).collect();
        KernelModel {
            support_vectors: x.select(ndarray::Axis(0), &idx),
            alphas: idx.iter().map(|&i| sol.alpha[i]).collect(),
            labels: idx.iter().map(|&i| y[i]).collect(),
            bias: sol.bias,
            beta,
            c,
        }
    }
}

pub fn train_kernel_svm(
    x: ArrayView2<f64>,
    y: &[f64],
    c: f64,
    beta: f64,
    options: &SmoOptions,
) -> Result<KernelModel> {
    if x.nrows() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.nrows(),
            found: y.len(),
        });
    }
    if !(beta > 0.0) {
        return Err(Error::InvalidParameter(format!("beta must be > 0, got {beta}")));
    }
    let gram = gaussian_gram(x, beta);
    let sol = solve_smo(gram.view(), y, c, options)?;
    let model = KernelModel::from_solution(x, y, &sol, beta, c);
    if !sol.converged {
        return Err(Error::NotConverged {
            iterations: sol.iterations,
            gap: sol.gap,
            best: Box::new(model),
        });
    }
    Ok(model)
}
