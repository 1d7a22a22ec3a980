use ndarray::{ArrayView2, Axis};

use super::linear::{LinearOptions, LinearProblem};
use super::smo::{solve_smo, SmoOptions};
use super::tree::{train_tree, TreeOptions};
use super::{class_ids, sign, Classifier};
use crate::dataset::stratified_folds;
use crate::error::{Error, Result};
use crate::stats::squared_distance;

/// Stratified k-fold accuracy of a fit-and-count routine.
///
/// `fit_count(train, test)` trains on the `train` rows and returns how many
/// `test` rows it classifies correctly.
pub fn cv_accuracy<F>(y: &[f64], folds: usize, seed: u64, fit_count: F) -> Result<f64>
where
    F: Fn(&[usize], &[usize]) -> Result<usize> + Sync,
{
    let plan = stratified_folds(&class_ids(y), 2, folds, seed)?;
    let counts: Vec<Result<usize>> = par_range_map!(0..folds, |f| {
        let (train, test) = plan.split(f);
        fit_count(&train, &test)
    });
    let mut correct = 0;
    for c in counts {
        correct += c?;
    }
    Ok(correct as f64 / y.len() as f64)
}

fn sorted_grid(grid: &[f64], name: &str) -> Result<Vec<f64>> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter(format!("{name} grid is empty")));
    }
    let mut g = grid.to_vec();
    g.sort_by(f64::total_cmp);
    g.dedup();
    Ok(g)
}

/// Inner-CV grid search for the Gaussian SVM. Ties go to the smaller C,
/// then the smaller beta.
pub fn tune_svm(
    x: ArrayView2<f64>,
    y: &[f64],
    c_grid: &[f64],
    beta_grid: &[f64],
    folds: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let cs = sorted_grid(c_grid, "C")?;
    let betas = sorted_grid(beta_grid, "beta")?;
    if cs.len() == 1 && betas.len() == 1 {
        return Ok((cs[0], betas[0]));
    }
    let m = y.len();
    let rows: Vec<Vec<f64>> = x.rows().into_iter().map(|r| r.to_vec()).collect();
    let dist: Vec<Vec<f64>> = par_range_map!(0..m, |i| {
        (0..m)
            .map(|j| squared_distance(&rows[i], &rows[j]))
            .collect::<Vec<f64>>()
    });
    let cells: Vec<(f64, f64)> = cs
        .iter()
        .flat_map(|&c| betas.iter().map(move |&b| (c, b)))
        .collect();
    let scores: Vec<Result<f64>> = par_map!(cells, |&(c, beta): &(f64, f64)| {
        cv_accuracy(y, folds, seed, |train, test| {
            let gram = ndarray::Array2::from_shape_fn((train.len(), train.len()), |(a, b)| {
                (-beta * dist[train[a]][train[b]]).exp()
            });
            let yt: Vec<f64> = train.iter().map(|&i| y[i]).collect();
            let sol = solve_smo(gram.view(), &yt, c, &SmoOptions::default())?;
            Ok(test
                .iter()
                .filter(|&&t| {
                    let s: f64 = train
                        .iter()
                        .enumerate()
                        .filter(|(a, _)| sol.alpha[*a] > 0.0)
                        .map(|(a, &i)| sol.alpha[a] * yt[a] * (-beta * dist[t][i]).exp())
                        .sum::<f64>()
                        + sol.bias;
                    sign(s) == y[t]
                })
                .count())
        })
    });
    pick_best(&cells, scores)
}

/// Inner-CV choice of C for the linear SVM; ties go to the smaller C.
/// Within each inner fold the grid is walked upwards on one shared dual
/// problem, each fit starting from the previous fit's dual point.
pub fn tune_linear_c(
    z: ArrayView2<f64>,
    y: &[f64],
    c_grid: &[f64],
    folds: usize,
    seed: u64,
    options: &LinearOptions,
) -> Result<f64> {
    let cs = sorted_grid(c_grid, "C")?;
    if cs.len() == 1 {
        return Ok(cs[0]);
    }
    let plan = stratified_folds(&class_ids(y), 2, folds, seed)?;
    let per_fold: Vec<Result<Vec<usize>>> = par_range_map!(0..folds, |f| {
        let (train, test) = plan.split(f);
        let zt = z.select(Axis(0), &train);
        let yt: Vec<f64> = train.iter().map(|&i| y[i]).collect();
        let problem = LinearProblem::new(zt.view(), &yt)?;
        cs.iter()
            .map(|&c| {
                let (model, _) = problem.solve(c, options)?;
                Ok(test
                    .iter()
                    .filter(|&&t| model.predict(&z.row(t).to_vec()) == y[t])
                    .count())
            })
            .collect()
    });
    let mut correct = vec![0usize; cs.len()];
    for counts in per_fold {
        for (total, n) in correct.iter_mut().zip(counts?) {
            *total += n;
        }
    }
    let cells: Vec<(f64, f64)> = cs.iter().map(|&c| (c, 0.0)).collect();
    let scores = correct.iter().map(|&n| Ok(n as f64 / y.len() as f64)).collect();
    Ok(pick_best(&cells, scores)?.0)
}

/// Inner-CV choice of the depth limit in `0..=options.max_depth`; ties go
/// to the shallower tree. Depth 0 is a single majority leaf.
pub fn tune_tree_depth(
    z: ArrayView2<f64>,
    y: &[f64],
    options: &TreeOptions,
    folds: usize,
    seed: u64,
) -> Result<usize> {
    let cells: Vec<(f64, f64)> = (0..=options.max_depth).map(|d| (d as f64, 0.0)).collect();
    let scores: Vec<Result<f64>> = par_map!(cells, |&(d, _): &(f64, f64)| {
        let opts = TreeOptions {
            max_depth: d as usize,
            ..options.clone()
        };
        cv_accuracy(y, folds, seed, |train, test| {
            let zt = z.select(Axis(0), train);
            let yt: Vec<f64> = train.iter().map(|&i| y[i]).collect();
            let model = train_tree(zt.view(), &yt, &opts)?;
            Ok(test
                .iter()
                .filter(|&&t| model.predict(&z.row(t).to_vec()) == y[t])
                .count())
        })
    });
    Ok(pick_best(&cells, scores)?.0 as usize)
}

fn pick_best(cells: &[(f64, f64)], scores: Vec<Result<f64>>) -> Result<(f64, f64)> {
    let mut best: Option<(f64, (f64, f64))> = None;
    for (&cell, score) in cells.iter().zip(scores) {
        let s = score?;
        if best.map_or(true, |(b, _)| s > b) {
            best = Some((s, cell));
        }
    }
    Ok(best.expect("grid is non-empty").1)
}
