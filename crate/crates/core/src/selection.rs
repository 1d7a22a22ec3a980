//! Filtering of generated features.
//!
//! Kernel and window features are local: they are scored only over their
//! neighborhood (the ε-ball of a kernel anchor, the member set of a window)
//! and must pass three tests there: at least `eta` members, mutual
//! information above `alpha`, and a maximum class posterior of at least
//! `delta`. Projections cover all data and only face the MI test. Original
//! columns pass through.

use std::fmt;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::features::{Family, FeatureDef, FeatureSpace, GenParams};

/// Equal-width bin count used for continuous features.
pub fn default_bins(m: usize) -> usize {
    ((m as f64).sqrt().ceil() as usize).clamp(2, 10)
}

fn is_binary(values: &[f64]) -> bool {
    values.iter().all(|&v| v == 0.0 || v == 1.0)
}

/// Bins for one feature: 2 for a 0/1 feature, [`default_bins`] otherwise.
pub fn feature_bins(values: &[f64]) -> usize {
    if is_binary(values) {
        2
    } else {
        default_bins(values.len())
    }
}

fn discretize(values: &[f64], bins: usize) -> Vec<usize> {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let width = hi - lo;
    values
        .iter()
        .map(|&v| {
            if !(width > 0.0) {
                0
            } else {
                (((v - lo) / width * bins as f64) as usize).min(bins - 1)
            }
        })
        .collect()
}

fn entropy_bits(counts: impl Iterator<Item = usize>, total: f64) -> f64 {
    counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum()
}

/// Plug-in mutual information, in bits, between `values` discretized into
/// `bins` equal-width bins and the class labels.
pub fn mutual_information(values: &[f64], labels: &[usize], bins: usize) -> f64 {
    assert_eq!(values.len(), labels.len(), "values and labels differ in length");
    let m = values.len();
    if m == 0 {
        return 0.0;
    }
    let n_classes = labels.iter().max().map_or(0, |&c| c + 1);
    let mut class_counts = vec![0usize; n_classes];
    for &l in labels {
        class_counts[l] += 1;
    }
    if class_counts.iter().filter(|&&c| c > 0).count() < 2 {
        log::warn!("mutual information requested for single-class labels");
        return 0.0;
    }
    let bins = bins.max(2);
    let cells = discretize(values, bins);
    let mut joint = vec![0usize; bins * n_classes];
    let mut bin_counts = vec![0usize; bins];
    for (&b, &l) in cells.iter().zip(labels) {
        joint[b * n_classes + l] += 1;
        bin_counts[b] += 1;
    }
    let total = m as f64;
    let h_class = entropy_bits(class_counts.iter().copied(), total);
    let h_bin = entropy_bits(bin_counts.iter().copied(), total);
    let h_joint = entropy_bits(joint.iter().copied(), total);
    (h_class + h_bin - h_joint).max(0.0)
}

/// Largest class fraction among the rows of `restricted_to` (all rows if
/// `None`) whose value exceeds `active_above`. Zero when nothing is active.
pub fn max_posterior(
    values: &[f64],
    labels: &[usize],
    n_classes: usize,
    restricted_to: Option<&[usize]>,
    active_above: f64,
) -> f64 {
    let mut counts = vec![0usize; n_classes];
    let mut total = 0usize;
    let mut visit = |i: usize| {
        if values[i] > active_above {
            counts[labels[i]] += 1;
            total += 1;
        }
    };
    match restricted_to {
        Some(idx) => idx.iter().for_each(|&i| visit(i)),
        None => (0..values.len()).for_each(&mut visit),
    }
    if total == 0 {
        return 0.0;
    }
    *counts.iter().max().unwrap_or(&0) as f64 / total as f64
}

/// Training rows where the kernel feature exceeds `epsilon`.
pub fn kernel_neighborhood(def: &FeatureDef, train: &Dataset, epsilon: f64) -> Result<Vec<usize>> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be in (0,1), got {epsilon}"
        )));
    }
    let FeatureDef::Kernel { anchor, .. } = def else {
        return Err(Error::InvalidParameter(format!(
            "expected a kernel feature, got {}",
            def.kind_name()
        )));
    };
    if anchor.len() != train.n_features() {
        return Err(Error::DimensionMismatch {
            expected: anchor.len(),
            found: train.n_features(),
        });
    }
    Ok((0..train.n_samples())
        .filter(|&i| def.evaluate(train.row(i)) > epsilon)
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rejection {
    EmptyNeighborhood,
    NeighborhoodTooSmall,
    LowMutualInformation,
    LowPosterior,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rejection::EmptyNeighborhood => "empty neighborhood",
            Rejection::NeighborhoodTooSmall => "neighborhood too small",
            Rejection::LowMutualInformation => "mutual information <= alpha",
            Rejection::LowPosterior => "max posterior < delta",
        })
    }
}

/// Scores of one feature; independent of the thresholds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FeatureScore {
    pub family: Family,
    pub mi: f64,
    pub posterior: f64,
    pub neighborhood: usize,
}

impl FeatureScore {
    /// First failed test under `alpha`/`delta`/`eta`, if any.
    pub fn rejection(&self, alpha: f64, delta: f64, eta: usize) -> Option<Rejection> {
        match self.family {
            Family::X => None,
            Family::Z => (self.mi <= alpha).then_some(Rejection::LowMutualInformation),
            Family::H | Family::K => {
                if self.neighborhood == 0 {
                    Some(Rejection::EmptyNeighborhood)
                } else if self.neighborhood < eta {
                    Some(Rejection::NeighborhoodTooSmall)
                } else if self.mi <= alpha {
                    Some(Rejection::LowMutualInformation)
                } else if self.posterior < delta {
                    Some(Rejection::LowPosterior)
                } else {
                    None
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelectionRecord {
    /// Position of the feature in the unfiltered space.
    pub feature: usize,
    pub kind: &'static str,
    pub mi: f64,
    pub posterior: f64,
    pub neighborhood: usize,
    pub accepted: bool,
    pub reason: Option<Rejection>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SelectionReport {
    pub records: Vec<SelectionRecord>,
}

impl SelectionReport {
    pub fn accepted(&self) -> usize {
        self.records.iter().filter(|r| r.accepted).count()
    }

    pub fn accepted_of_kind(&self, kind: &str) -> usize {
        self.records
            .iter()
            .filter(|r| r.accepted && r.kind == kind)
            .count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("feature,kind,mi,posterior,neighborhood,accepted,reason\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.feature,
                r.kind,
                r.mi,
                r.posterior,
                r.neighborhood,
                r.accepted,
                r.reason.map(|x| x.to_string()).unwrap_or_default()
            ));
        }
        out
    }
}

/// 1 where `labels == target`, 0 elsewhere, as class ids.
fn target_vs_rest(labels: &[usize], target: usize) -> Vec<usize> {
    labels.iter().map(|&l| usize::from(l != target)).collect()
}

fn majority_class(labels: &[usize], idx: &[usize], n_classes: usize) -> usize {
    let mut counts = vec![0usize; n_classes];
    for &i in idx {
        counts[labels[i]] += 1;
    }
    crate::stats::argmax(counts.iter().map(|&c| c as f64)).unwrap_or(0)
}

/// Score one feature over the training rows.
pub fn score_feature(def: &FeatureDef, train: &Dataset, params: &GenParams) -> FeatureScore {
    let m = train.n_samples();
    let k = train.n_classes();
    let values: Vec<f64> = (0..m).map(|i| def.evaluate(train.row(i))).collect();
    let labels = &train.labels;
    match def {
        FeatureDef::Original { .. } | FeatureDef::Projection { .. } => FeatureScore {
            family: def.family(),
            mi: mutual_information(&values, labels, feature_bins(&values)),
            posterior: max_posterior(&values, labels, k, None, f64::NEG_INFINITY),
            neighborhood: m,
        },
        FeatureDef::Window { class, .. } => {
            let members: Vec<usize> = (0..m).filter(|&i| values[i] > 0.5).collect();
            let target = target_vs_rest(labels, *class);
            FeatureScore {
                family: Family::H,
                mi: mutual_information(&values, &target, 2),
                posterior: max_posterior(&values, labels, k, Some(&members), 0.5),
                neighborhood: members.len(),
            }
        }
        FeatureDef::Kernel { .. } => {
            let hood: Vec<usize> = (0..m).filter(|&i| values[i] > params.epsilon).collect();
            let local_values: Vec<f64> = hood.iter().map(|&i| values[i]).collect();
            let majority = majority_class(labels, &hood, k);
            let local_target: Vec<usize> = hood
                .iter()
                .map(|&i| usize::from(labels[i] != majority))
                .collect();
            let mi = if hood.is_empty() {
                0.0
            } else {
                mutual_information(&local_values, &local_target, feature_bins(&local_values))
            };
            FeatureScore {
                family: Family::K,
                mi,
                posterior: max_posterior(&values, labels, k, Some(&hood), params.epsilon),
                neighborhood: hood.len(),
            }
        }
    }
}

pub fn score_space(space: &FeatureSpace, train: &Dataset, params: &GenParams) -> Vec<FeatureScore> {
    par_map!(space.defs(), |d: &FeatureDef| score_feature(d, train, params))
}

/// Drop features failing the acceptance tests; def order is preserved.
pub fn apply_acceptance(
    space: &FeatureSpace,
    train: &Dataset,
    params: &GenParams,
) -> Result<(FeatureSpace, SelectionReport)> {
    if space.is_empty() {
        return Err(Error::Empty("feature space".into()));
    }
    params.validate()?;
    let scores = score_space(space, train, params);
    let (filtered, report) = accept_with(space, &scores, params.alpha, params.delta, params.eta);
    if filtered.is_empty() {
        return Err(Error::AllRejected(Box::new(report)));
    }
    Ok((filtered, report))
}

/// Thresholding step of [`apply_acceptance`] over precomputed scores.
pub fn accept_with(
    space: &FeatureSpace,
    scores: &[FeatureScore],
    alpha: f64,
    delta: f64,
    eta: usize,
) -> (FeatureSpace, SelectionReport) {
    let mut keep = Vec::with_capacity(scores.len());
    let mut records = Vec::with_capacity(scores.len());
    for (i, (def, s)) in space.defs().iter().zip(scores).enumerate() {
        let reason = s.rejection(alpha, delta, eta);
        keep.push(reason.is_none());
        records.push(SelectionRecord {
            feature: i,
            kind: def.kind_name(),
            mi: s.mi,
            posterior: s.posterior,
            neighborhood: s.neighborhood,
            accepted: reason.is_none(),
            reason,
        });
    }
    (space.retain_indices(&keep), SelectionReport { records })
}

pub const ALPHA_GRID: [f64; 5] = [0.0, 0.005, 0.01, 0.05, 0.1];
pub const DELTA_GRID: [f64; 3] = [0.5, 0.6, 0.7];

/// Pick (alpha, delta) from the fixed grid so the number of accepted kernel
/// features lands closest to `target_fraction * m`.
///
/// Grid points that keep at least one kernel feature are preferred over
/// those that keep none. Ties go to the larger alpha, then the larger delta.
/// Without kernel features the thresholds in `params` are returned.
pub fn calibrate_retention(
    space: &FeatureSpace,
    train: &Dataset,
    params: &GenParams,
    target_fraction: f64,
) -> Result<(f64, f64)> {
    if !(target_fraction > 0.0 && target_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "target fraction must be in (0,1), got {target_fraction}"
        )));
    }
    let kernels: Vec<&FeatureDef> = space
        .defs()
        .iter()
        .filter(|d| d.family() == Family::K)
        .collect();
    if kernels.is_empty() {
        return Ok((params.alpha, params.delta));
    }
    let scores: Vec<FeatureScore> = par_map!(kernels, |d: &&FeatureDef| score_feature(d, train, params));
    Ok(calibrate_from_scores(
        &scores,
        params.eta,
        target_fraction * train.n_samples() as f64,
    ))
}

/// Grid search behind [`calibrate_retention`] over kernel-feature scores.
pub fn calibrate_from_scores(scores: &[FeatureScore], eta: usize, target: f64) -> (f64, f64) {
    // (non-empty?, distance, alpha, delta); smaller key wins.
    let mut best: Option<(bool, f64, f64, f64)> = None;
    for &alpha in &ALPHA_GRID {
        for &delta in &DELTA_GRID {
            let count = scores
                .iter()
                .filter(|s| s.rejection(alpha, delta, eta).is_none())
                .count();
            let empty = count == 0;
            let dist = (count as f64 - target).abs();
            let better = match best {
                None => true,
                Some((b_empty, b_dist, b_alpha, b_delta)) => {
                    if empty != b_empty {
                        !empty
                    } else if dist != b_dist {
                        dist < b_dist
                    } else if alpha != b_alpha {
                        alpha > b_alpha
                    } else {
                        delta > b_delta
                    }
                }
            };
            if better {
                best = Some((empty, dist, alpha, delta));
            }
        }
    }
    let (_, _, alpha, delta) = best.expect("grid is non-empty");
    (alpha, delta)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdaScore {
    pub feature: usize,
    pub score: f64,
}

/// Per-feature `(μ₁ - μ₂)² / (σ₁² + σ₂² + 1e-12)` for a two-class dataset.
pub fn fda_scores(train: &Dataset) -> Result<Vec<FdaScore>> {
    if train.n_classes() != 2 || train.class_counts().iter().any(|&c| c == 0) {
        return Err(Error::InvalidParameter(
            "FDA ranking needs exactly two populated classes".into(),
        ));
    }
    let n = train.n_features();
    Ok(par_range_map!(0..n, |j| {
        let mut sum = [0.0f64; 2];
        let mut sq = [0.0f64; 2];
        let mut cnt = [0usize; 2];
        for (i, &l) in train.labels.iter().enumerate() {
            let v = train.samples[(i, j)];
            sum[l] += v;
            sq[l] += v * v;
            cnt[l] += 1;
        }
        let mu = [sum[0] / cnt[0] as f64, sum[1] / cnt[1] as f64];
        let var = [
            (sq[0] / cnt[0] as f64 - mu[0] * mu[0]).max(0.0),
            (sq[1] / cnt[1] as f64 - mu[1] * mu[1]).max(0.0),
        ];
        let d = mu[0] - mu[1];
        FdaScore {
            feature: j,
            score: d * d / (var[0] + var[1] + 1e-12),
        }
    }))
}

/// Indices of the `keep` highest-scoring features, best first.
pub fn fda_rank(train: &Dataset, keep: usize) -> Result<Vec<usize>> {
    if keep == 0 {
        return Err(Error::InvalidParameter("keep must be positive".into()));
    }
    if keep > train.n_features() {
        return Err(Error::InvalidParameter(format!(
            "keep {keep} exceeds {} features",
            train.n_features()
        )));
    }
    let mut scores = fda_scores(train)?;
    scores.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.feature.cmp(&b.feature)));
    Ok(scores.into_iter().take(keep).map(|s| s.feature).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::generate_parity;
    use crate::features::{build_feature_space, Provenance};
    use ndarray::{array, Array2};

    fn two_class(samples: Array2<f64>, labels: Vec<usize>) -> Dataset {
        let n = samples.ncols();
        Dataset::new(
            samples,
            labels,
            (0..n).map(|j| format!("f{j}")).collect(),
            vec!["a".into(), "b".into()],
        )
        .unwrap()
    }

    #[test]
    fn mi_simple_cases() {
        let labels = vec![0, 1, 0, 1, 0, 1];
        let f: Vec<f64> = labels.iter().map(|&l| l as f64).collect();
        assert!((mutual_information(&f, &labels, 2) - 1.0).abs() < 1e-12);
        assert_eq!(mutual_information(&[3.0; 6], &labels, 2), 0.0);
        assert_eq!(mutual_information(&f, &[0; 6], 2), 0.0);
    }

    #[test]
    fn bin_rules() {
        assert_eq!(default_bins(4), 2);
        assert_eq!(default_bins(50), 8);
        assert_eq!(default_bins(10_000), 10);
        assert_eq!(feature_bins(&[0.0, 1.0, 1.0]), 2);
        assert_eq!(feature_bins(&[0.0, 0.5, 1.0, 2.0]), 2);
        assert_eq!(feature_bins(&vec![0.3; 30]), 6);
    }

    #[test]
    fn posterior_examples() {
        let labels = vec![0, 0, 0, 0, 0, 0, 0, 1, 1, 1];
        let on = vec![1.0; 10];
        assert!((max_posterior(&on, &labels, 2, None, 0.5) - 0.7).abs() < 1e-12);
        let idx = [0, 1, 2];
        assert_eq!(max_posterior(&on, &labels, 2, Some(&idx), 0.5), 1.0);
        assert_eq!(max_posterior(&[0.0; 10], &labels, 2, None, 0.5), 0.0);
    }

    #[test]
    fn kernel_neighborhood_posterior_by_counting() {
        // 12 points within radius of the anchor (9 of class 0), 5 far away.
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..12 {
            rows.push([0.1 * i as f64, 0.0]);
            labels.push(usize::from(i >= 9));
        }
        for i in 0..5 {
            rows.push([100.0 + i as f64, 0.0]);
            labels.push(1);
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        let d = two_class(Array2::from_shape_vec((17, 2), flat).unwrap(), labels);
        let def = FeatureDef::kernel(vec![0.0, 0.0], 1.0 / 32.0).unwrap();
        let hood = kernel_neighborhood(&def, &d, 0.001).unwrap();
        // brute force: squared distance below 32 ln 1000
        let radius2 = 32.0 * 1000f64.ln();
        assert!((radius2 - 221.0).abs() < 0.1);
        let brute: Vec<usize> = (0..17)
            .filter(|&i| d.row(i).iter().map(|v| v * v).sum::<f64>() < radius2)
            .collect();
        assert_eq!(hood, brute);
        assert_eq!(hood.len(), 12);
        let values: Vec<f64> = (0..17).map(|i| def.evaluate(d.row(i))).collect();
        let p = max_posterior(&values, &d.labels, 2, Some(&hood), 0.001);
        assert!((p - 0.75).abs() < 1e-12);
        assert!(kernel_neighborhood(&def, &d, 1.0).is_err());
    }

    #[test]
    fn isolated_anchor_neighborhood() {
        let d = two_class(array![[0.0], [1000.0], [2000.0]], vec![0, 1, 0]);
        let def = FeatureDef::kernel(vec![0.0], 1.0 / 32.0).unwrap();
        assert_eq!(kernel_neighborhood(&def, &d, 0.001).unwrap(), vec![0]);
    }

    fn popcount_window(k: usize) -> FeatureDef {
        FeatureDef::window(vec![1.0; 8], k as f64 - 0.5, k as f64 + 0.5, k % 2).unwrap()
    }

    #[test]
    fn pure_window_on_parity_accepted() {
        let p = generate_parity(8).unwrap();
        let params = GenParams {
            alpha: 0.005,
            delta: 0.5,
            eta: 10,
            ..Default::default()
        };
        let s = score_feature(&popcount_window(2), &p, &params);
        assert_eq!(s.neighborhood, 28);
        assert_eq!(s.posterior, 1.0);
        // direct computation: 28 of 256 in the window, all even; 128 even overall
        let (n, m) = (28.0f64, 256.0f64);
        let h = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
        let h_class = 1.0;
        let h_cond = ((m - n) / m) * (h(100.0 / (m - n)) + h(128.0 / (m - n)));
        let expected = h_class - h_cond;
        assert!((s.mi - expected).abs() < 1e-12, "{} vs {expected}", s.mi);
        assert!(s.rejection(params.alpha, params.delta, params.eta).is_none());
    }

    #[test]
    fn small_window_rejected() {
        let s = FeatureScore {
            family: Family::H,
            mi: 0.2,
            posterior: 1.0,
            neighborhood: 9,
        };
        assert_eq!(s.rejection(0.005, 0.5, 10), Some(Rejection::NeighborhoodTooSmall));
        let k = FeatureScore {
            family: Family::K,
            mi: 0.2,
            posterior: 0.5,
            neighborhood: 40,
        };
        assert_eq!(k.rejection(0.0, 0.6, 10), Some(Rejection::LowPosterior));
        assert_eq!(k.rejection(0.0, 0.5, 10), None);
        let z = FeatureScore {
            family: Family::Z,
            mi: 0.0,
            posterior: 0.5,
            neighborhood: 40,
        };
        assert_eq!(z.rejection(0.0, 0.9, 10), Some(Rejection::LowMutualInformation));
    }

    #[test]
    fn acceptance_keeps_originals_and_order() {
        let p = generate_parity(4).unwrap();
        let mut space = build_feature_space(&p, &GenParams::default(), "X".parse().unwrap()).unwrap();
        space
            .push(popcount_window_n(4, 2), Provenance { family: Family::H, pass: 0 })
            .unwrap();
        let params = GenParams {
            eta: 3,
            ..Default::default()
        };
        let (out, report) = apply_acceptance(&space, &p, &params).unwrap();
        assert_eq!(out.len(), 5);
        assert_eq!(report.accepted(), 5);
        let (again, _) = apply_acceptance(&out, &p, &params).unwrap();
        assert_eq!(again, out);
    }

    fn popcount_window_n(n: usize, k: usize) -> FeatureDef {
        FeatureDef::window(vec![1.0; n], k as f64 - 0.5, k as f64 + 0.5, k % 2).unwrap()
    }

    #[test]
    fn all_rejected_is_an_error() {
        let p = generate_parity(4).unwrap();
        let mut space = FeatureSpace::new(4);
        space
            .push(popcount_window_n(4, 0), Provenance { family: Family::H, pass: 0 })
            .unwrap();
        let err = apply_acceptance(&space, &p, &GenParams::default()).unwrap_err();
        match err {
            Error::AllRejected(report) => {
                assert_eq!(report.records[0].reason, Some(Rejection::NeighborhoodTooSmall))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn calibration_rules() {
        let mk = |mi: f64, posterior: f64| FeatureScore {
            family: Family::K,
            mi,
            posterior,
            neighborhood: 50,
        };
        // everything passes at (0, 0.5) only; target is the full count
        let scores: Vec<FeatureScore> = (0..10).map(|_| mk(0.001, 0.55)).collect();
        assert_eq!(calibrate_from_scores(&scores, 10, 10.0), (0.0, 0.5));
        // target 3 of 10; mi spread gives counts per alpha
        let scores: Vec<FeatureScore> = (0..10)
            .map(|i| mk([0.0001, 0.007, 0.02, 0.07, 0.2][i % 5], 0.8))
            .collect();
        let (a, d) = calibrate_from_scores(&scores, 10, 3.0);
        // counts: alpha 0 ->10, 0.005->8, 0.01->6, 0.05->4, 0.1->2; |4-3| = |2-3|, larger alpha wins
        assert_eq!((a, d), (0.1, 0.7));
        // all-or-nothing grid: prefer the non-empty point
        let scores: Vec<FeatureScore> = (0..100).map(|_| mk(0.9, 0.5)).collect();
        assert_eq!(calibrate_from_scores(&scores, 10, 30.0), (0.1, 0.5));
    }

    #[test]
    fn fda_ordering() {
        let d = two_class(
            array![[0.0, 5.0, 1.0], [0.0, 5.0, -1.0], [1.0, 5.0, 3.0], [1.0, 5.0, 1.0]],
            vec![0, 0, 1, 1],
        );
        // feature 0: separated with zero variance; feature 1: identical; feature 2: sep 2, var 1+1
        let order = fda_rank(&d, 3).unwrap();
        assert_eq!(order, vec![0, 2, 1]);
        let s = fda_scores(&d).unwrap();
        assert_eq!(s[1].score, 0.0);
        assert!((s[2].score - 2.0).abs() < 1e-9);
        assert!(fda_rank(&d, 0).is_err());
        assert!(fda_rank(&d, 4).is_err());
    }

    #[test]
    fn report_csv_header() {
        let r = SelectionReport::default();
        assert!(r.to_csv().starts_with("feature,kind,mi,posterior,neighborhood,accepted,reason"));
    }
}
