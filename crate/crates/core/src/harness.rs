//! Cross-validated experiments.
//!
//! Every fold runs the same pipeline on its training rows only: missing
//! value imputation, optional FDA column trimming, standardization, feature
//! generation, retention calibration, selection, inner-CV tuning and
//! training. Test rows are transformed with the fitted pipeline and scored.
//! Folds are independent jobs; results are gathered in fold order.

use std::collections::hash_map::DefaultHasher;
use std::fmt::{self, Write as _};
use std::hash::{Hash, Hasher};
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{Duration, Instant};

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::{
    generate_parity, impute_class_mean, impute_with_means, make_folds, observed_means,
    two_gaussians, Dataset, Manifest, Scaler,
};
use crate::derive_seed;
use crate::error::{Error, Result};
use crate::features::{
    build_feature_space, Family, FamilySet, FeatureDef, FeatureSpace, GenParams, Provenance,
};
use crate::learners::{
    train_kernel_svm, train_knn, train_linear_svm, train_tree, tune_linear_c, tune_svm,
    tune_tree_depth, Classifier,
    LinearOptions, SmoOptions, TreeOptions,
};
use crate::model_io::Model;
use crate::selection::{accept_with, calibrate_from_scores, fda_rank, score_space, SelectionReport};
use crate::stats::{mean, sample_std};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClassifierKind {
    /// Linear SVM on the selected expanded space.
    SfmLinear,
    /// Linear SVM on the original columns.
    Svml,
    /// Gaussian-kernel SVM on the original columns, (C, β) tuned.
    Svmg,
    /// kNN on the selected expanded space, k tuned.
    Knn,
    /// Separability-split tree on the selected expanded space.
    Tree,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 5] = [
        ClassifierKind::SfmLinear,
        ClassifierKind::Svml,
        ClassifierKind::Svmg,
        ClassifierKind::Knn,
        ClassifierKind::Tree,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClassifierKind::SfmLinear => "sfm",
            ClassifierKind::Svml => "svml",
            ClassifierKind::Svmg => "svmg",
            ClassifierKind::Knn => "knn",
            ClassifierKind::Tree => "tree",
        }
    }

    /// Only the SFM, kNN and tree learners use generated features.
    pub fn uses_families(self) -> bool {
        !matches!(self, ClassifierKind::Svml | ClassifierKind::Svmg)
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sfm" | "sfm-linear" => Ok(ClassifierKind::SfmLinear),
            "svml" => Ok(ClassifierKind::Svml),
            "svmg" => Ok(ClassifierKind::Svmg),
            "knn" => Ok(ClassifierKind::Knn),
            "tree" | "ssv" => Ok(ClassifierKind::Tree),
            other => Err(Error::Parse(format!("unknown classifier {other:?}"))),
        }
    }
}

/// Where an experiment's data comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum DatasetSpec {
    Manifest(PathBuf),
    Parity { bits: usize },
    TwoGaussians { per_class: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct NamedDataset {
    pub name: String,
    pub data: Dataset,
    pub reference: Option<String>,
}

impl DatasetSpec {
    pub fn load(&self) -> Result<NamedDataset> {
        match self {
            DatasetSpec::Manifest(path) => {
                let manifest = Manifest::from_file(path)?;
                Ok(NamedDataset {
                    data: manifest.load()?,
                    name: manifest.name,
                    reference: manifest.reference,
                })
            }
            DatasetSpec::Parity { bits } => Ok(NamedDataset {
                name: format!("parity{bits}"),
                data: generate_parity(*bits)?,
                reference: None,
            }),
            DatasetSpec::TwoGaussians { per_class, seed } => Ok(NamedDataset {
                name: "two-gaussians".into(),
                data: two_gaussians(*per_class, *seed),
                reference: None,
            }),
        }
    }
}

impl FromStr for DatasetSpec {
    type Err = Error;

    /// `parity<bits>`, `gaussians` or a manifest path.
    fn from_str(s: &str) -> Result<Self> {
        if let Some(bits) = s.strip_prefix("parity") {
            if let Ok(bits) = bits.parse() {
                return Ok(DatasetSpec::Parity { bits });
            }
        }
        if s == "gaussians" {
            return Ok(DatasetSpec::TwoGaussians {
                per_class: 100,
                seed: 0,
            });
        }
        Ok(DatasetSpec::Manifest(PathBuf::from(s)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: DatasetSpec,
    pub classifier: ClassifierKind,
    pub families: FamilySet,
    /// Generation and selection parameters; the seed field is replaced by a
    /// per-fold seed derived from `seed`.
    pub params: GenParams,
    pub folds: usize,
    pub repeats: usize,
    pub seed: u64,
    /// Keep only this many FDA-ranked columns before anything else.
    pub fda_keep: Option<usize>,
    /// Calibrate (α, δ) to keep about this fraction of m kernel features;
    /// `None` uses `params.alpha` and `params.delta` as given.
    pub retention: Option<f64>,
    pub linear_c_grid: Vec<f64>,
    pub svm_c_grid: Vec<f64>,
    pub svm_beta_grid: Vec<f64>,
    pub inner_folds: usize,
    pub knn_k_max: usize,
    pub tree: TreeOptions,
    /// Pick the tree depth limit in `0..=tree.max_depth` by inner CV.
    pub tune_tree_depth: bool,
    pub linear: LinearOptions,
    pub smo: SmoOptions,
}

fn powers_of_two(exponents: impl Iterator<Item = i32>) -> Vec<f64> {
    exponents.map(|e| 2f64.powi(e)).collect()
}

impl ExperimentConfig {
    pub fn new(dataset: DatasetSpec, classifier: ClassifierKind, families: FamilySet) -> Self {
        ExperimentConfig {
            dataset,
            classifier,
            families,
            params: GenParams::default(),
            folds: 10,
            repeats: 1,
            seed: 0,
            fda_keep: None,
            retention: Some(0.3),
            linear_c_grid: powers_of_two((-5..=7).step_by(2)),
            svm_c_grid: powers_of_two((-1..=9).step_by(2)),
            svm_beta_grid: powers_of_two((-9..=-1).step_by(2)),
            inner_folds: 5,
            knn_k_max: 20,
            tree: TreeOptions::default(),
            tune_tree_depth: true,
            linear: LinearOptions::default(),
            smo: SmoOptions::default(),
        }
    }

    /// The families actually expanded: X alone for the two plain SVMs.
    pub fn effective_families(&self) -> FamilySet {
        if self.classifier.uses_families() {
            self.families
        } else {
            FamilySet::new(&[Family::X])
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.classifier.uses_families() && self.families.is_empty() {
            return bad("feature family set is empty".into());
        }
        if self.folds < 2 {
            return bad(format!("fold count {} < 2", self.folds));
        }
        if self.repeats == 0 {
            return bad("repeat count must be >= 1".into());
        }
        if self.inner_folds < 2 {
            return bad(format!("inner fold count {} < 2", self.inner_folds));
        }
        if self.knn_k_max == 0 {
            return bad("knn k range is empty".into());
        }
        if self.fda_keep == Some(0) {
            return bad("fda_keep must be >= 1".into());
        }
        if let Some(r) = self.retention {
            if !(r > 0.0 && r < 1.0) {
                return bad(format!("retention must be in (0,1), got {r}"));
            }
        }
        for (name, grid) in [
            ("linear C", &self.linear_c_grid),
            ("SVM C", &self.svm_c_grid),
            ("SVM beta", &self.svm_beta_grid),
        ] {
            if grid.is_empty() || grid.iter().any(|&v| !(v > 0.0)) {
                return bad(format!("{name} grid must be non-empty and positive"));
            }
        }
        self.params.validate()
    }
}

/// Everything fitted on one training partition.
#[derive(Clone, Debug, PartialEq)]
pub struct FittedPipeline {
    /// Per-column training means used to fill missing test values.
    pub fill: Option<Vec<f64>>,
    /// Columns kept by FDA trimming, in rank order.
    pub columns: Option<Vec<usize>>,
    pub scaler: Scaler,
    pub space: FeatureSpace,
    pub report: Option<SelectionReport>,
    pub alpha: f64,
    pub delta: f64,
    pub model: Model,
}

impl FittedPipeline {
    /// Raw rows to the expanded coordinates the model was trained on.
    pub fn prepare(&self, data: &Dataset) -> Result<Array2<f64>> {
        let mut data = match &self.fill {
            Some(means) if data.has_missing() => impute_with_means(data, means),
            _ => data.clone(),
        };
        if let Some(cols) = &self.columns {
            data = data.select_columns(cols);
        }
        if data.n_features() != self.scaler.mean.len() {
            return Err(Error::DimensionMismatch {
                expected: self.scaler.mean.len(),
                found: data.n_features(),
            });
        }
        self.space.transform(&self.scaler.transform(&data.samples))
    }

    /// Predicted ±1 labels (+1 is class 0).
    pub fn predict(&self, data: &Dataset) -> Result<Vec<f64>> {
        let z = self.prepare(data)?;
        let rows: Vec<usize> = (0..z.nrows()).collect();
        Ok(par_map!(rows, |&i: &usize| {
            self.model.predict(&z.row(i).iter().copied().collect::<Vec<f64>>())
        }))
    }

    pub fn accuracy(&self, data: &Dataset) -> Result<f64> {
        let y = data.signed_labels();
        let pred = self.predict(data)?;
        if y.is_empty() {
            return Ok(f64::NAN);
        }
        Ok(pred.iter().zip(&y).filter(|(p, t)| p == t).count() as f64 / y.len() as f64)
    }

    /// Features in the final space by family, in X, Z, H, K order.
    pub fn accepted_by_family(&self) -> [usize; 4] {
        Family::ALL.map(|f| self.space.count_family(f))
    }

    /// Text form of every fitted parameter.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let join = |v: &[f64]| v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(" ");
        if let Some(fill) = &self.fill {
            let _ = writeln!(out, "fill {}", join(fill));
        }
        if let Some(cols) = &self.columns {
            let c: Vec<String> = cols.iter().map(|c| c.to_string()).collect();
            let _ = writeln!(out, "columns {}", c.join(" "));
        }
        let _ = writeln!(out, "scale_mean {}", join(&self.scaler.mean));
        let _ = writeln!(out, "scale_sd {}", join(&self.scaler.scale));
        let _ = writeln!(out, "thresholds {} {}", self.alpha, self.delta);
        out.push_str(&self.space.to_text());
        out.push_str(&self.model.to_text());
        out
    }

    /// Hash of [`FittedPipeline::to_text`]; equal pipelines give equal digests.
    pub fn digest(&self) -> String {
        let mut h = DefaultHasher::new();
        self.to_text().hash(&mut h);
        format!("{:016x}", h.finish())
    }
}

/// Fit the whole pipeline on `train`. Nothing outside `train` is read.
pub fn fit_pipeline(config: &ExperimentConfig, train: &Dataset, seed: u64) -> Result<FittedPipeline> {
    config.validate()?;
    if train.n_samples() < 2 {
        return Err(Error::Empty("training partition".into()));
    }
    let (train, fill) = if train.has_missing() {
        (impute_class_mean(train)?, Some(observed_means(train)))
    } else {
        (train.clone(), None)
    };
    let columns = match config.fda_keep {
        Some(keep) if keep < train.n_features() => Some(fda_rank(&train, keep)?),
        _ => None,
    };
    let train = match &columns {
        Some(cols) => train.select_columns(cols),
        None => train,
    };
    let scaler = Scaler::fit(&train.samples);
    let train = train.with_samples(scaler.transform(&train.samples));
    let y = train.signed_labels();

    let params = GenParams {
        seed: derive_seed(seed, 1),
        ..config.params.clone()
    };
    let linear = config.linear.clone();
    let inner_seed = derive_seed(seed, 3);

    let full = build_feature_space(&train, &params, config.effective_families())?;
    let scores = score_space(&full, &train, &params);
    let (alpha, delta) = match config.retention {
        Some(fraction) if full.count_family(Family::K) > 0 => {
            let kernel_scores: Vec<_> = scores
                .iter()
                .filter(|s| s.family == Family::K)
                .cloned()
                .collect();
            calibrate_from_scores(
                &kernel_scores,
                params.eta,
                fraction * train.n_samples() as f64,
            )
        }
        _ => (params.alpha, params.delta),
    };
    let (space, report) = accept_with(&full, &scores, alpha, delta, params.eta);
    if space.is_empty() {
        return Err(Error::AllRejected(Box::new(report)));
    }
    let z = space.transform(&train.samples)?;

    let model = match config.classifier {
        ClassifierKind::SfmLinear | ClassifierKind::Svml => {
            let c = tune_linear_c(
                z.view(),
                &y,
                &config.linear_c_grid,
                config.inner_folds,
                inner_seed,
                &linear,
            )?;
            Model::Linear(train_linear_svm(z.view(), &y, c, &linear)?.0)
        }
        ClassifierKind::Svmg => {
            let (c, beta) = tune_svm(
                z.view(),
                &y,
                &config.svm_c_grid,
                &config.svm_beta_grid,
                config.inner_folds,
                inner_seed,
            )?;
            match train_kernel_svm(z.view(), &y, c, beta, &config.smo) {
                Ok(m) => Model::Kernel(m),
                Err(Error::NotConverged {
                    iterations,
                    gap,
                    best,
                }) => {
                    log::warn!("SMO stopped after {iterations} iterations (gap {gap:.2e}); using best iterate");
                    Model::Kernel(*best)
                }
                Err(e) => return Err(e),
            }
        }
        ClassifierKind::Knn => Model::Neighbor(train_knn(
            z.view(),
            &y,
            1..=config.knn_k_max,
            config.inner_folds,
            inner_seed,
        )?),
        ClassifierKind::Tree => {
            let mut options = config.tree.clone();
            if config.tune_tree_depth {
                options.max_depth =
                    tune_tree_depth(z.view(), &y, &config.tree, config.inner_folds, inner_seed)?;
            }
            Model::Tree(train_tree(z.view(), &y, &options)?)
        }
    };

    Ok(FittedPipeline {
        fill,
        columns,
        scaler,
        space,
        report: Some(report),
        alpha,
        delta,
        model,
    })
}

/// Result of one fold.
#[derive(Clone, Debug, PartialEq)]
pub struct FoldOutcome {
    pub repeat: usize,
    pub fold: usize,
    pub accuracy: f64,
    /// Final feature counts in X, Z, H, K order.
    pub accepted: [usize; 4],
    pub alpha: f64,
    pub delta: f64,
    pub digest: String,
}

/// Fit on `train_idx` rows, score on `test_idx` rows.
pub fn run_fold(
    config: &ExperimentConfig,
    data: &Dataset,
    train_idx: &[usize],
    test_idx: &[usize],
    seed: u64,
) -> Result<(FoldOutcome, FittedPipeline)> {
    let mut seen = vec![false; data.n_samples()];
    for &i in train_idx {
        seen[i] = true;
    }
    if test_idx.iter().any(|&i| seen[i]) {
        return Err(Error::InvalidParameter("training and test rows overlap".into()));
    }
    let pipeline = fit_pipeline(config, &data.subset(train_idx), seed)?;
    let accuracy = pipeline.accuracy(&data.subset(test_idx))?;
    let outcome = FoldOutcome {
        repeat: 0,
        fold: 0,
        accuracy,
        accepted: pipeline.accepted_by_family(),
        alpha: pipeline.alpha,
        delta: pipeline.delta,
        digest: pipeline.digest(),
    };
    Ok((outcome, pipeline))
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub dataset: String,
    pub reference: Option<String>,
    pub classifier: ClassifierKind,
    pub families: FamilySet,
    pub folds: Vec<FoldOutcome>,
    pub mean: f64,
    /// Sample standard deviation, (k−1) denominator.
    pub std: f64,
    pub wall_time: Duration,
}

/// Equality ignores wall time.
impl PartialEq for ExperimentResult {
    fn eq(&self, other: &Self) -> bool {
        self.dataset == other.dataset
            && self.reference == other.reference
            && self.classifier == other.classifier
            && self.families == other.families
            && self.folds == other.folds
            && self.mean.to_bits() == other.mean.to_bits()
            && self.std.to_bits() == other.std.to_bits()
    }
}

impl ExperimentResult {
    pub fn accuracies(&self) -> Vec<f64> {
        self.folds.iter().map(|f| f.accuracy).collect()
    }

    /// Mean final feature count per family, X, Z, H, K order.
    pub fn mean_accepted(&self) -> [f64; 4] {
        let k = self.folds.len().max(1) as f64;
        let mut out = [0.0; 4];
        for f in &self.folds {
            for (o, &c) in out.iter_mut().zip(&f.accepted) {
                *o += c as f64 / k;
            }
        }
        out
    }

    /// `mean ± std` in percent.
    pub fn cell(&self) -> String {
        format!("{:.1}±{:.1}", 100.0 * self.mean, 100.0 * self.std)
    }
}

/// Load the configured dataset and run every fold.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let named = config.dataset.load()?;
    run_on(config, &named)
}

/// [`run_experiment`] on an already loaded dataset.
pub fn run_on(config: &ExperimentConfig, named: &NamedDataset) -> Result<ExperimentResult> {
    config.validate()?;
    let start = Instant::now();
    let data = &named.data;
    let mut jobs = Vec::new();
    for r in 0..config.repeats {
        let plan = make_folds(data, config.folds, derive_seed(config.seed, r as u64))?;
        for f in 0..config.folds {
            jobs.push((r, f, plan.clone()));
        }
    }
    let outcomes: Vec<Result<FoldOutcome>> = par_map!(jobs, |(r, f, plan): &(usize, usize, _)| {
        let (train, test) = plan.split(*f);
        let seed = derive_seed(config.seed, 1_000_003 * (*r as u64 + 1) + *f as u64);
        run_fold(config, data, &train, &test, seed).map(|(o, _)| FoldOutcome {
            repeat: *r,
            fold: *f,
            ..o
        })
    });

    let total = outcomes.len();
    let mut folds = Vec::with_capacity(total);
    let mut failures = Vec::new();
    for ((r, f, _), o) in jobs.iter().zip(outcomes) {
        match o {
            Ok(o) => folds.push(o),
            Err(e) => failures.push(format!("repeat {r} fold {f}: {e}")),
        }
    }
    if !failures.is_empty() {
        return Err(Error::FoldsFailed {
            failed: failures.len(),
            total,
            details: failures.join("; "),
        });
    }
    let acc: Vec<f64> = folds.iter().map(|f| f.accuracy).collect();
    Ok(ExperimentResult {
        dataset: named.name.clone(),
        reference: named.reference.clone(),
        classifier: config.classifier,
        families: config.effective_families(),
        mean: mean(&acc),
        std: sample_std(&acc),
        folds,
        wall_time: start.elapsed(),
    })
}

pub const RESULTS_HEADER: &str = "dataset,classifier,family_combo,fold,accuracy";
pub const SUMMARY_HEADER: &str = "dataset,classifier,family_combo,folds,mean,std";

/// One row per fold.
pub fn results_csv<'a>(results: impl IntoIterator<Item = &'a ExperimentResult>) -> String {
    let mut out = format!("{RESULTS_HEADER}\n");
    for r in results {
        for (i, f) in r.folds.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.dataset, r.classifier, r.families, i, f.accuracy
            );
        }
    }
    out
}

/// One row per experiment.
pub fn summary_csv<'a>(results: impl IntoIterator<Item = &'a ExperimentResult>) -> String {
    let mut out = format!("{SUMMARY_HEADER}\n");
    for r in results {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.dataset,
            r.classifier,
            r.families,
            r.folds.len(),
            r.mean,
            r.std
        );
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Done(ExperimentResult),
    Failed(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TableRow {
    pub dataset: String,
    pub reference: Option<String>,
    pub cells: Vec<Cell>,
}

/// Rows are datasets, columns are family combinations.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub classifier: ClassifierKind,
    pub combos: Vec<FamilySet>,
    pub rows: Vec<TableRow>,
    /// Datasets that could not be loaded, with the reason.
    pub skipped: Vec<(String, String)>,
}

impl Table {
    /// True when a dataset was skipped or a cell failed.
    pub fn is_partial(&self) -> bool {
        !self.skipped.is_empty()
            || self
                .rows
                .iter()
                .any(|r| r.cells.iter().any(|c| matches!(c, Cell::Failed(_))))
    }

    pub fn results(&self) -> impl Iterator<Item = &ExperimentResult> {
        self.rows.iter().flat_map(|r| {
            r.cells.iter().filter_map(|c| match c {
                Cell::Done(res) => Some(res),
                Cell::Failed(_) => None,
            })
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("dataset,classifier,family_combo,mean,std,status\n");
        for row in &self.rows {
            for (combo, cell) in self.combos.iter().zip(&row.cells) {
                match cell {
                    Cell::Done(r) => {
                        let _ = writeln!(
                            out,
                            "{},{},{},{},{},ok",
                            row.dataset, self.classifier, combo, r.mean, r.std
                        );
                    }
                    Cell::Failed(_) => {
                        let _ = writeln!(out, "{},{},{},,,failed", row.dataset, self.classifier, combo);
                    }
                }
            }
        }
        out
    }

    /// Fixed-width text table with reference cells appended when known.
    pub fn to_text(&self) -> String {
        let mut header = vec![format!("{} / dataset", self.classifier)];
        header.extend(self.combos.iter().map(|c| c.to_string()));
        let mut lines = vec![header];
        for row in &self.rows {
            let mut line = vec![row.dataset.clone()];
            line.extend(row.cells.iter().map(|c| match c {
                Cell::Done(r) => r.cell(),
                Cell::Failed(_) => "failed".to_string(),
            }));
            lines.push(line);
        }
        let cols = lines[0].len();
        let widths: Vec<usize> = (0..cols)
            .map(|j| lines.iter().map(|l| l[j].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for (i, line) in lines.iter().enumerate() {
            let cells: Vec<String> = line
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(j, (s, &w))| {
                    let pad = w - s.chars().count();
                    if j == 0 {
                        format!("{s}{}", " ".repeat(pad))
                    } else {
                        format!("{}{s}", " ".repeat(pad))
                    }
                })
                .collect();
            out.push_str(cells.join("  ").trim_end());
            if i > 0 {
                if let Some(r) = &self.rows[i - 1].reference {
                    let _ = write!(out, "   [reference: {r}]");
                }
            }
            out.push('\n');
        }
        for row in &self.rows {
            for (combo, cell) in self.combos.iter().zip(&row.cells) {
                if let Cell::Failed(reason) = cell {
                    let _ = writeln!(out, "failed {} {}: {}", row.dataset, combo, reason);
                }
            }
        }
        for (name, reason) in &self.skipped {
            let _ = writeln!(out, "skipped {name}: {reason}");
        }
        out
    }
}

/// Run `base` over every dataset and family combination.
pub fn run_table(
    datasets: &[DatasetSpec],
    base: &ExperimentConfig,
    combos: &[FamilySet],
) -> Result<Table> {
    if datasets.is_empty() {
        return Err(Error::Empty("dataset list".into()));
    }
    if combos.is_empty() {
        return Err(Error::Empty("family combination list".into()));
    }
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for spec in datasets {
        let named = match spec.load() {
            Ok(n) => n,
            Err(e) => {
                let label = match spec {
                    DatasetSpec::Manifest(p) => p.display().to_string(),
                    other => format!("{other:?}"),
                };
                log::warn!("skipping dataset {label}: {e}");
                skipped.push((label, e.to_string()));
                continue;
            }
        };
        let cells: Vec<Cell> = par_map!(combos, |combo: &FamilySet| {
            let config = ExperimentConfig {
                dataset: spec.clone(),
                families: *combo,
                ..base.clone()
            };
            match run_on(&config, &named) {
                Ok(r) => Cell::Done(r),
                Err(e) => {
                    log::warn!("{} {}: {e}", named.name, combo);
                    Cell::Failed(e.to_string())
                }
            }
        });
        rows.push(TableRow {
            dataset: named.name.clone(),
            reference: named.reference.clone(),
            cells,
        });
    }
    Ok(Table {
        classifier: base.classifier,
        combos: combos.to_vec(),
        rows,
        skipped,
    })
}

/// Kernel anchors accepted at one (α, δ) grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub alpha: f64,
    pub delta: f64,
    /// One flag per dataset row.
    pub accepted: Vec<bool>,
}

impl SweepPoint {
    pub fn count(&self) -> usize {
        self.accepted.iter().filter(|&&a| a).count()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub data: Dataset,
    pub points: Vec<SweepPoint>,
}

impl Sweep {
    /// `alpha,delta,anchor_<feature>...,class,accepted`, one row per anchor
    /// per grid point.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha,delta");
        for name in &self.data.feature_names {
            let _ = write!(out, ",anchor_{name}");
        }
        out.push_str(",class,accepted\n");
        for p in &self.points {
            for (i, &acc) in p.accepted.iter().enumerate() {
                let _ = write!(out, "{},{}", p.alpha, p.delta);
                for v in self.data.row(i) {
                    let _ = write!(out, ",{v}");
                }
                let _ = writeln!(
                    out,
                    ",{},{}",
                    self.data.class_names[self.data.labels[i]],
                    u8::from(acc)
                );
            }
        }
        out
    }
}

/// Score a kernel feature anchored at every row of `data` once, then list
/// which anchors pass at each (α, δ) pair. Coordinates are used as given.
pub fn sweep_selection(
    data: &Dataset,
    alphas: &[f64],
    deltas: &[f64],
    params: &GenParams,
) -> Result<Sweep> {
    if alphas.is_empty() || deltas.is_empty() {
        return Err(Error::Empty("sweep grid".into()));
    }
    params.validate()?;
    let mut space = FeatureSpace::new(data.n_features());
    let mut row_def = Vec::with_capacity(data.n_samples());
    for i in 0..data.n_samples() {
        let def = FeatureDef::kernel(data.row(i).to_vec(), params.beta)?;
        let provenance = Provenance {
            family: Family::K,
            pass: i,
        };
        if space.push(def.clone(), provenance)? {
            row_def.push(space.len() - 1);
        } else {
            row_def.push(space.defs().iter().position(|d| *d == def).expect("duplicate exists"));
        }
    }
    let scores = score_space(&space, data, params);
    let mut points = Vec::with_capacity(alphas.len() * deltas.len());
    for &alpha in alphas {
        for &delta in deltas {
            let accepted = row_def
                .iter()
                .map(|&d| scores[d].rejection(alpha, delta, params.eta).is_none())
                .collect();
            points.push(SweepPoint {
                alpha,
                delta,
                accepted,
            });
        }
    }
    Ok(Sweep {
        data: data.clone(),
        points,
    })
}

/// Copy of `data` with the labels of `rows` shuffled among themselves.
pub fn permute_labels(data: &Dataset, rows: &[usize], seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels: Vec<usize> = rows.iter().map(|&i| data.labels[i]).collect();
    labels.shuffle(&mut rng);
    let mut out = data.clone();
    for (&i, l) in rows.iter().zip(labels) {
        out.labels[i] = l;
    }
    out
}

/// Refit every fold of the first repeat with its test labels permuted and
/// check the fitted pipeline is unchanged. Returns the failing fold ids.
pub fn audit_leakage(config: &ExperimentConfig, data: &Dataset) -> Result<Vec<usize>> {
    config.validate()?;
    let plan = make_folds(data, config.folds, derive_seed(config.seed, 0))?;
    let folds: Vec<usize> = (0..config.folds).collect();
    let checks: Vec<Result<bool>> = par_map!(folds, |&f: &usize| {
        let (train, test) = plan.split(f);
        let seed = derive_seed(config.seed, 1_000_003 + f as u64);
        let (honest, _) = run_fold(config, data, &train, &test, seed)?;
        let shuffled = permute_labels(data, &test, derive_seed(seed, 99));
        let (permuted, _) = run_fold(config, &shuffled, &train, &test, seed)?;
        Ok(honest.digest == permuted.digest)
    });
    let mut bad = Vec::new();
    for (f, c) in checks.into_iter().enumerate() {
        if !c? {
            bad.push(f);
        }
    }
    Ok(bad)
}
