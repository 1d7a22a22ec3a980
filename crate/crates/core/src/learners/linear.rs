use faer::linalg::solvers::{Llt, Solve};
use faer::{Mat, Side};
use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2};

use super::{check_labels, Classifier};
use crate::error::{Error, Result};
use crate::stats::dot;

/// `sign(w·z + b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub c: f64,
}

impl Classifier for LinearModel {
    fn decision(&self, x: &[f64]) -> f64 {
        dot(&self.weights, x) + self.bias
    }

    fn input_dim(&self) -> usize {
        self.weights.len()
    }
}

impl LinearModel {
    pub fn negated(&self) -> LinearModel {
        LinearModel {
            weights: self.weights.iter().map(|w| -w).collect(),
            bias: -self.bias,
            c: self.c,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearOptions {
    /// Cap on interior-point iterations.
    pub max_iterations: usize,
    /// Stop once the duality gap falls below this fraction of the primal
    /// objective, which bounds the relative distance to the optimum.
    pub tolerance: f64,
}

impl Default for LinearOptions {
    fn default() -> Self {
        LinearOptions {
            max_iterations: 200,
            tolerance: 1e-4,
        }
    }
}

/// Best primal objective after each iteration.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinearTrace {
    pub objectives: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Relative duality gap at the last iteration.
    pub gap: f64,
}

/// `½(‖w‖² + b²) + C Σ max(0, 1 - yᵢ(w·zᵢ + b))`.
pub fn primal_objective(model: &LinearModel, z: ArrayView2<f64>, y: &[f64]) -> f64 {
    let reg = 0.5 * (dot(&model.weights, &model.weights) + model.bias * model.bias);
    let loss: f64 = z
        .rows()
        .into_iter()
        .zip(y)
        .map(|(row, &yi)| {
            let s = row.iter().zip(&model.weights).map(|(a, b)| a * b).sum::<f64>() + model.bias;
            (1.0 - yi * s).max(0.0)
        })
        .sum();
    reg + model.c * loss
}

/// One training set in dual form: `min ½αᵀQα - Σα` over `0 ≤ α ≤ C` with
/// `Q = UUᵀ`, where row i of `U` is `yᵢ(zᵢ, 1)`. The bias is the weight of a
/// constant input of 1, so there is no equality constraint. Everything that
/// does not depend on C is built once and shared by every solve.
pub struct LinearProblem<'a> {
    z: ArrayView2<'a, f64>,
    u: Array2<f64>,
    // Q itself, kept only when it is smaller than UᵀU.
    q: Option<Array2<f64>>,
}

impl<'a> LinearProblem<'a> {
    pub fn new(z: ArrayView2<'a, f64>, y: &'a [f64]) -> Result<Self> {
        let (m, d) = z.dim();
        if m != y.len() {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: y.len(),
            });
        }
        if m < 2 {
            return Err(Error::InvalidParameter("linear SVM needs at least 2 rows".into()));
        }
        check_labels(y)?;
        let u = Array2::from_shape_fn((m, d + 1), |(i, j)| y[i] * if j < d { z[[i, j]] } else { 1.0 });
        let q = (d + 1 >= m).then(|| u.dot(&u.t()));
        Ok(LinearProblem { z, u, q })
    }

    fn model(&self, w: &Array1<f64>, c: f64) -> LinearModel {
        let d = self.z.ncols();
        LinearModel {
            weights: w.slice(s![..d]).to_vec(),
            bias: w[d],
            c,
        }
    }

    // Primal objective of the augmented weights `w` and the margins `Uw`.
    fn primal(w: &Array1<f64>, margins: &Array1<f64>, c: f64) -> f64 {
        0.5 * w.dot(w) + c * margins.iter().map(|v| (1.0 - v).max(0.0)).sum::<f64>()
    }

    fn factor(&self, diag: &[f64]) -> Option<Factor> {
        match &self.q {
            Some(q) => {
                let m = diag.len();
                let full = Mat::from_fn(m, m, |i, j| q[[i, j]] + if i == j { diag[i] } else { 0.0 });
                Some(Factor::Full(cholesky(full)?))
            }
            None => {
                let inv: Vec<f64> = diag.iter().map(|v| 1.0 / v).collect();
                let mut scaled = self.u.clone();
                for (mut row, v) in scaled.rows_mut().into_iter().zip(&inv) {
                    row *= v.sqrt();
                }
                let mut inner = scaled.t().dot(&scaled);
                inner.diag_mut().mapv_inplace(|v| v + 1.0);
                let p = inner.nrows();
                let inner = Mat::from_fn(p, p, |i, j| inner[[i, j]]);
                Some(Factor::LowRank(cholesky(inner)?, inv))
            }
        }
    }

    // Solves `(Q + diag) x = r` with a factorization from `factor`.
    fn solve_with(&self, factor: &Factor, r: &[f64]) -> Vec<f64> {
        match factor {
            Factor::Full(chol) => solve_column(chol, r),
            // Woodbury: (D + UUᵀ)⁻¹ = D⁻¹ - D⁻¹U(I + UᵀD⁻¹U)⁻¹UᵀD⁻¹.
            Factor::LowRank(chol, inv) => {
                let dr: Array1<f64> = r.iter().zip(inv).map(|(a, b)| a * b).collect();
                let t = self.u.t().dot(&dr);
                let s = solve_column(chol, t.as_slice().unwrap());
                let us = self.u.dot(&ArrayView1::from(&s));
                dr.iter().zip(&us).zip(inv).map(|((a, b), v)| a - v * b).collect()
            }
        }
    }

    /// Primal-dual interior point with Mehrotra's predictor-corrector, run
    /// until the relative duality gap reaches `options.tolerance`. Each
    /// iteration factors `Q + D` for a positive diagonal `D`, via a Cholesky
    /// of size `min(m, d + 1)`. The returned model is the iterate with the
    /// lowest primal objective seen.
    pub fn solve(&self, c: f64, options: &LinearOptions) -> Result<(LinearModel, LinearTrace)> {
        if !(c > 0.0) {
            return Err(Error::InvalidParameter(format!("C must be > 0, got {c}")));
        }
        let m = self.u.nrows();
        // `slack` is C - α, carried separately so it cannot round to zero.
        let mut a = vec![0.5 * c; m];
        let mut slack = a.clone();
        let w0 = self.u.t().dot(&ArrayView1::from(&a));
        let g0 = self.u.dot(&w0);
        let spread = g0.iter().map(|g| (g - 1.0).abs()).sum::<f64>() / m as f64;
        let floor = spread.max(1.0);
        let mut lower: Vec<f64> = g0.iter().map(|g| (g - 1.0).max(0.0) + floor).collect();
        let mut upper: Vec<f64> = g0.iter().map(|g| (1.0 - g).max(0.0) + floor).collect();

        let mut trace = LinearTrace::default();
        let mut best = (f64::INFINITY, w0.clone());
        while trace.iterations < options.max_iterations {
            let w = self.u.t().dot(&ArrayView1::from(&a));
            let margins = self.u.dot(&w);
            let primal = Self::primal(&w, &margins, c);
            if !primal.is_finite() {
                break;
            }
            if primal < best.0 {
                best = (primal, w.clone());
            }
            let dual = a.iter().sum::<f64>() - 0.5 * w.dot(&w);
            trace.objectives.push(best.0);
            trace.gap = (best.0 - dual) / best.0;
            if trace.gap <= options.tolerance {
                trace.converged = true;
                break;
            }
            trace.iterations += 1;

            let residual: Vec<f64> = (0..m).map(|i| margins[i] - 1.0 - lower[i] + upper[i]).collect();
            let mu = (dot(&a, &lower) + dot(&slack, &upper)) / (2 * m) as f64;
            let diag: Vec<f64> = (0..m)
                .map(|i| (lower[i] / a[i] + upper[i] / slack[i]).max(DIAG_FLOOR))
                .collect();
            let Some(factor) = self.factor(&diag) else { break };

            // Direction for complementarity targets `rl` (α·λ) and `ru` (s·υ).
            let direction = |rl: &[f64], ru: &[f64]| {
                let rhs: Vec<f64> = (0..m).map(|i| -residual[i] + rl[i] / a[i] - ru[i] / slack[i]).collect();
                let da = self.solve_with(&factor, &rhs);
                let dl: Vec<f64> = (0..m).map(|i| (rl[i] - lower[i] * da[i]) / a[i]).collect();
                let du: Vec<f64> = (0..m).map(|i| (ru[i] + upper[i] * da[i]) / slack[i]).collect();
                (da, dl, du)
            };
            let rl: Vec<f64> = (0..m).map(|i| -a[i] * lower[i]).collect();
            let ru: Vec<f64> = (0..m).map(|i| -slack[i] * upper[i]).collect();
            let (da, dl, du) = direction(&rl, &ru);
            let t = max_step(&a, &slack, &lower, &upper, &da, &dl, &du).min(1.0);
            let mu_aff = (0..m)
                .map(|i| (a[i] + t * da[i]) * (lower[i] + t * dl[i]) + (slack[i] - t * da[i]) * (upper[i] + t * du[i]))
                .sum::<f64>()
                / (2 * m) as f64;
            let target = (mu_aff / mu).powi(3) * mu;
            let rl: Vec<f64> = (0..m).map(|i| target - a[i] * lower[i] - da[i] * dl[i]).collect();
            let ru: Vec<f64> = (0..m).map(|i| target - slack[i] * upper[i] + da[i] * du[i]).collect();
            let (da, dl, du) = direction(&rl, &ru);
            let t = (0.995 * max_step(&a, &slack, &lower, &upper, &da, &dl, &du)).min(1.0);
            for i in 0..m {
                a[i] += t * da[i];
                slack[i] -= t * da[i];
                lower[i] += t * dl[i];
                upper[i] += t * du[i];
            }
        }
        Ok((self.model(&best.1, c), trace))
    }
}

// Keeps `D⁻¹` finite once the multipliers of a free variable vanish.
const DIAG_FLOOR: f64 = 1e-12;

enum Factor {
    Full(Llt<f64>),
    LowRank(Llt<f64>, Vec<f64>),
}

fn solve_column(chol: &Llt<f64>, r: &[f64]) -> Vec<f64> {
    let x = chol.solve(Mat::from_fn(r.len(), 1, |i, _| r[i]));
    (0..r.len()).map(|i| x[(i, 0)]).collect()
}

// Cholesky with a growing ridge for matrices that are positive definite in
// exact arithmetic but not numerically.
fn cholesky(mut h: Mat<f64>) -> Option<Llt<f64>> {
    let scale = (0..h.nrows()).map(|i| h[(i, i)]).fold(1.0, f64::max);
    let mut ridge = 0.0;
    for _ in 0..6 {
        if let Ok(chol) = h.llt(Side::Lower) {
            return Some(chol);
        }
        let next = if ridge == 0.0 { 1e-12 * scale } else { ridge * 100.0 };
        for i in 0..h.nrows() {
            h[(i, i)] += next - ridge;
        }
        ridge = next;
    }
    None
}

// Largest step keeping `α` in `[0, C]` and both multipliers nonnegative.
fn max_step(a: &[f64], slack: &[f64], lower: &[f64], upper: &[f64], da: &[f64], dl: &[f64], du: &[f64]) -> f64 {
    let mut t = f64::INFINITY;
    for i in 0..a.len() {
        if da[i] < 0.0 {
            t = t.min(-a[i] / da[i]);
        }
        if da[i] > 0.0 {
            t = t.min(slack[i] / da[i]);
        }
        if dl[i] < 0.0 {
            t = t.min(-lower[i] / dl[i]);
        }
        if du[i] < 0.0 {
            t = t.min(-upper[i] / du[i]);
        }
    }
    t
}

/// Soft-margin linear SVM on the rows of `z`; see [`LinearProblem::solve`].
pub fn train_linear_svm<'a>(
    z: ArrayView2<'a, f64>,
    y: &'a [f64],
    c: f64,
    options: &LinearOptions,
) -> Result<(LinearModel, LinearTrace)> {
    LinearProblem::new(z, y)?.solve(c, options)
}
