//! Dataset ingestion, synthesis, cleaning, standardization and stratified
//! fold construction.
//!
//! Missing cells are stored as `NaN` until [`impute_class_mean`] (or
//! [`impute_with_means`] for unlabeled test rows) fills them.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use ndarray::{Array2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Dense numeric samples with class labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub samples: Array2<f64>,
    pub labels: Vec<usize>,
    pub feature_names: Vec<String>,
    pub class_names: Vec<String>,
}

impl Dataset {
    pub fn new(
        samples: Array2<f64>,
        labels: Vec<usize>,
        feature_names: Vec<String>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        if samples.nrows() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: samples.nrows(),
                found: labels.len(),
            });
        }
        if samples.ncols() != feature_names.len() {
            return Err(Error::DimensionMismatch {
                expected: samples.ncols(),
                found: feature_names.len(),
            });
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= class_names.len()) {
            return Err(Error::InvalidParameter(format!(
                "label id {bad} has no class name ({} classes)",
                class_names.len()
            )));
        }
        Ok(Dataset {
            samples,
            labels,
            feature_names,
            class_names,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.samples.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.samples.ncols()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Labels as +1 (class id 0, the first class seen) and -1 (any other class).
    pub fn signed_labels(&self) -> Vec<f64> {
        self.labels
            .iter()
            .map(|&l| if l == 0 { 1.0 } else { -1.0 })
            .collect()
    }

    pub fn has_missing(&self) -> bool {
        self.samples.iter().any(|v| v.is_nan())
    }

    /// Rows at `indices`, in that order. Class and feature names are kept.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            samples: self.samples.select(Axis(0), indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            feature_names: self.feature_names.clone(),
            class_names: self.class_names.clone(),
        }
    }

    /// Columns at `columns`, in that order.
    pub fn select_columns(&self, columns: &[usize]) -> Dataset {
        Dataset {
            samples: self.samples.select(Axis(1), columns),
            labels: self.labels.clone(),
            feature_names: columns
                .iter()
                .map(|&c| self.feature_names[c].clone())
                .collect(),
            class_names: self.class_names.clone(),
        }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.samples
            .row(i)
            .to_slice()
            .expect("samples are stored in standard layout")
    }

    /// Replace the sample matrix, keeping labels and names.
    pub fn with_samples(&self, samples: Array2<f64>) -> Dataset {
        debug_assert_eq!(samples.nrows(), self.labels.len());
        let feature_names = if samples.ncols() == self.feature_names.len() {
            self.feature_names.clone()
        } else {
            (0..samples.ncols()).map(|j| format!("f{j}")).collect()
        };
        Dataset {
            samples: samples.as_standard_layout().into_owned(),
            labels: self.labels.clone(),
            feature_names,
            class_names: self.class_names.clone(),
        }
    }
}

/// How a CSV file is laid out.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvOptions {
    /// Column holding the class; `None` means the last column.
    pub class_column: Option<usize>,
    pub has_header: bool,
    pub missing_marker: String,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            class_column: None,
            has_header: false,
            missing_marker: "?".to_string(),
        }
    }
}

/// Parse a comma-separated file. Class labels become dense ids in
/// first-seen order; cells equal to the missing marker become `NaN`.
pub fn load_csv(path: impl AsRef<Path>, options: &CsvOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv(&text, options)
}

pub fn parse_csv(text: &str, options: &CsvOptions) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut header: Option<Vec<String>> = None;
    let mut width: Option<usize> = None;
    let mut class_col = 0;
    let mut rows: Vec<f64> = Vec::new();
    let mut labels = Vec::new();
    let mut class_names: Vec<String> = Vec::new();
    let mut class_ids: HashMap<String, usize> = HashMap::new();

    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let line = i + 1;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        match width {
            None => {
                let w = record.len();
                class_col = options.class_column.unwrap_or(w.saturating_sub(1));
                if w < 2 || class_col >= w {
                    return Err(Error::InvalidParameter(format!(
                        "class column {class_col} out of range for {w} columns"
                    )));
                }
                width = Some(w);
                if options.has_header && header.is_none() {
                    header = Some(record.iter().map(str::to_string).collect());
                    continue;
                }
            }
            Some(w) if record.len() != w => {
                return Err(Error::MalformedRow {
                    line,
                    expected: w,
                    found: record.len(),
                });
            }
            Some(_) => {}
        }

        for (j, token) in record.iter().enumerate() {
            if j == class_col {
                let next = class_names.len();
                let id = *class_ids.entry(token.to_string()).or_insert_with(|| {
                    class_names.push(token.to_string());
                    next
                });
                labels.push(id);
            } else if token == options.missing_marker {
                rows.push(f64::NAN);
            } else {
                let v: f64 = token.parse().map_err(|_| Error::BadNumber {
                    line,
                    column: j,
                    token: token.to_string(),
                })?;
                rows.push(v);
            }
        }
    }

    let width = width.ok_or_else(|| Error::Empty("no rows in CSV input".into()))?;
    if labels.is_empty() {
        return Err(Error::Empty("no data rows in CSV input".into()));
    }
    let n = width - 1;
    let feature_names = match header {
        Some(h) => h
            .into_iter()
            .enumerate()
            .filter(|(j, _)| *j != class_col)
            .map(|(_, s)| s)
            .collect(),
        None => (0..n).map(|j| format!("x{j}")).collect(),
    };
    let samples = Array2::from_shape_vec((labels.len(), n), rows)
        .map_err(|e| Error::Parse(e.to_string()))?;
    Dataset::new(samples, labels, feature_names, class_names)
}

/// Replace every missing cell with the mean of the observed values of the
/// same feature within the same class.
pub fn impute_class_mean(data: &Dataset) -> Result<Dataset> {
    if !data.has_missing() {
        return Ok(data.clone());
    }
    let k = data.n_classes();
    let n = data.n_features();
    let mut sums = vec![vec![0.0; n]; k];
    let mut counts = vec![vec![0usize; n]; k];
    for (row, &c) in data.samples.rows().into_iter().zip(&data.labels) {
        for (j, &v) in row.iter().enumerate() {
            if !v.is_nan() {
                sums[c][j] += v;
                counts[c][j] += 1;
            }
        }
    }
    let mut out = data.samples.clone();
    for (mut row, &c) in out.rows_mut().into_iter().zip(&data.labels) {
        for (j, v) in row.iter_mut().enumerate() {
            if v.is_nan() {
                if counts[c][j] == 0 {
                    return Err(Error::AllMissing {
                        feature: data.feature_names[j].clone(),
                        class: data.class_names[c].clone(),
                    });
                }
                *v = sums[c][j] / counts[c][j] as f64;
            }
        }
    }
    Ok(data.with_samples(out))
}

/// Per-feature means over observed (non-missing) cells, pooled over classes.
/// Features with no observed value get 0.
pub fn observed_means(data: &Dataset) -> Vec<f64> {
    data.samples
        .columns()
        .into_iter()
        .map(|col| {
            let (s, c) = col
                .iter()
                .filter(|v| !v.is_nan())
                .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
            if c == 0 {
                0.0
            } else {
                s / c as f64
            }
        })
        .collect()
}

/// Fill missing cells from fixed per-feature values, without looking at labels.
pub fn impute_with_means(data: &Dataset, means: &[f64]) -> Dataset {
    let mut out = data.samples.clone();
    for mut row in out.rows_mut() {
        for (v, &m) in row.iter_mut().zip(means) {
            if v.is_nan() {
                *v = m;
            }
        }
    }
    data.with_samples(out)
}

/// Per-feature affine standardization fitted on one partition.
#[derive(Clone, Debug, PartialEq)]
pub struct Scaler {
    pub mean: Vec<f64>,
    /// Standard deviation, or 1 for constant features.
    pub scale: Vec<f64>,
}

impl Scaler {
    pub fn fit(samples: &Array2<f64>) -> Scaler {
        let m = samples.nrows().max(1) as f64;
        let mut mean = Vec::with_capacity(samples.ncols());
        let mut scale = Vec::with_capacity(samples.ncols());
        for col in samples.columns() {
            let mu = col.sum() / m;
            let var = col.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / m;
            let sd = var.sqrt();
            mean.push(mu);
            scale.push(if sd > 1e-12 * (1.0 + mu.abs()) { sd } else { 1.0 });
        }
        Scaler { mean, scale }
    }

    pub fn transform(&self, samples: &Array2<f64>) -> Array2<f64> {
        let mut out = samples.clone();
        for mut row in out.rows_mut() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (*v - self.mean[j]) / self.scale[j];
            }
        }
        out
    }

    pub fn inverse_transform(&self, samples: &Array2<f64>) -> Array2<f64> {
        let mut out = samples.clone();
        for mut row in out.rows_mut() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = *v * self.scale[j] + self.mean[j];
            }
        }
        out
    }
}

/// Fit a scaler on `train` and apply it to both `train` and `apply_to`.
///
/// Constant training features map to 0 (their scale is recorded as 1).
pub fn standardize(train: &Dataset, apply_to: &Dataset) -> Result<(Dataset, Dataset, Scaler)> {
    if train.n_samples() < 2 {
        return Err(Error::InvalidParameter(
            "standardization needs at least 2 training rows".into(),
        ));
    }
    if train.n_features() != apply_to.n_features() {
        return Err(Error::DimensionMismatch {
            expected: train.n_features(),
            found: apply_to.n_features(),
        });
    }
    let scaler = Scaler::fit(&train.samples);
    let a = train.with_samples(scaler.transform(&train.samples));
    let b = apply_to.with_samples(scaler.transform(&apply_to.samples));
    Ok((a, b, scaler))
}

/// All `2^bits` binary vectors labelled by parity (class 0 = even, 1 = odd).
pub fn generate_parity(bits: usize) -> Result<Dataset> {
    if !(2..=20).contains(&bits) {
        return Err(Error::InvalidParameter(format!(
            "parity bits must be in [2, 20], got {bits}"
        )));
    }
    let m = 1usize << bits;
    let mut samples = Array2::zeros((m, bits));
    let mut labels = Vec::with_capacity(m);
    for v in 0..m {
        for j in 0..bits {
            samples[(v, j)] = ((v >> (bits - 1 - j)) & 1) as f64;
        }
        labels.push((v.count_ones() % 2) as usize);
    }
    Dataset::new(
        samples,
        labels,
        (0..bits).map(|j| format!("b{j}")).collect(),
        vec!["even".into(), "odd".into()],
    )
}

/// Two unit-variance spherical 2-D Gaussians centred at (-1, 0) and (+1, 0).
pub fn two_gaussians(per_class: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Array2::zeros((2 * per_class, 2));
    let mut labels = Vec::with_capacity(2 * per_class);
    for c in 0..2 {
        let cx = if c == 0 { -1.0 } else { 1.0 };
        for i in 0..per_class {
            let r = c * per_class + i;
            let dx: f64 = StandardNormal.sample(&mut rng);
            let dy: f64 = StandardNormal.sample(&mut rng);
            samples[(r, 0)] = cx + dx;
            samples[(r, 1)] = dy;
            labels.push(c);
        }
    }
    Dataset::new(
        samples,
        labels,
        vec!["x".into(), "y".into()],
        vec!["A".into(), "B".into()],
    )
    .expect("shapes are consistent by construction")
}

/// Stratified assignment of rows to `k` folds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldPlan {
    pub k: usize,
    pub assignments: Vec<usize>,
    pub seed: u64,
}

impl FoldPlan {
    /// (training indices, test indices) for one fold, both ascending.
    pub fn split(&self, fold: usize) -> (Vec<usize>, Vec<usize>) {
        let mut train = Vec::new();
        let mut test = Vec::new();
        for (i, &f) in self.assignments.iter().enumerate() {
            if f == fold {
                test.push(i);
            } else {
                train.push(i);
            }
        }
        (train, test)
    }
}

pub fn make_folds(data: &Dataset, k: usize, seed: u64) -> Result<FoldPlan> {
    stratified_folds(&data.labels, data.n_classes(), k, seed)
}

/// Shuffle each class with a seeded RNG and deal its members round-robin,
/// continuing the rotation across classes so fold sizes stay balanced.
pub fn stratified_folds(
    labels: &[usize],
    n_classes: usize,
    k: usize,
    seed: u64,
) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("fold count {k} < 2")));
    }
    if k > labels.len() {
        return Err(Error::InvalidParameter(format!(
            "fold count {k} exceeds {} samples",
            labels.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignments = vec![0; labels.len()];
    let mut offset = 0;
    for c in 0..n_classes {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == c).collect();
        if !members.is_empty() && members.len() < k {
            log::warn!("class {c} has {} members, fewer than {k} folds", members.len());
        }
        members.shuffle(&mut rng);
        for (r, &i) in members.iter().enumerate() {
            assignments[i] = (offset + r) % k;
        }
        offset = (offset + members.len()) % k;
    }
    Ok(FoldPlan {
        k,
        assignments,
        seed,
    })
}

/// A dataset description: where the CSV lives and how to read it.
#[derive(Clone, Debug, PartialEq)]
pub struct Manifest {
    pub name: String,
    pub path: PathBuf,
    pub csv: CsvOptions,
    /// Published reference cells, e.g. `SFM(K)=94.6+-4.5`, shown next to results.
    pub reference: Option<String>,
}

impl Manifest {
    /// Parse `key=value` lines; `#` starts a comment. Relative paths are
    /// resolved against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Manifest> {
        let mut name = None;
        let mut path = None;
        let mut csv = CsvOptions::default();
        let mut reference = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!("manifest line {}: expected key=value", i + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "name" => name = Some(value.to_string()),
                "path" => path = Some(PathBuf::from(value)),
                "class_column" => {
                    csv.class_column = match value {
                        "last" | "" => None,
                        v => Some(v.parse().map_err(|_| {
                            Error::Parse(format!("manifest: bad class_column {v:?}"))
                        })?),
                    }
                }
                "has_header" => {
                    csv.has_header = parse_bool(value)
                        .ok_or_else(|| Error::Parse(format!("manifest: bad has_header {value:?}")))?
                }
                "missing_marker" => csv.missing_marker = value.to_string(),
                "reference" => reference = Some(value.to_string()),
                other => {
                    return Err(Error::Parse(format!("manifest: unknown key {other:?}")));
                }
            }
        }
        let path = path.ok_or_else(|| Error::Parse("manifest: missing path".into()))?;
        let path = if path.is_relative() {
            base_dir.join(path)
        } else {
            path
        };
        Ok(Manifest {
            name: name.unwrap_or_else(|| {
                path.file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default()
            }),
            path,
            csv,
            reference,
        })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Manifest> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Manifest::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// The data file location, falling back to `$SFM_DATA_DIR/<file name>`
    /// when the manifest path does not exist.
    pub fn resolved_path(&self) -> PathBuf {
        if self.path.exists() {
            return self.path.clone();
        }
        if let (Ok(dir), Some(file)) = (std::env::var("SFM_DATA_DIR"), self.path.file_name()) {
            let candidate = Path::new(&dir).join(file);
            if candidate.exists() {
                return candidate;
            }
        }
        self.path.clone()
    }

    pub fn load(&self) -> Result<Dataset> {
        load_csv(self.resolved_path(), &self.csv)
    }
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Some(true),
        "false" | "no" | "0" => Some(false),
        _ => None,
    }
}

/// Write a dataset as CSV with the class name in the last column.
pub fn write_csv(data: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)?;
    for (row, &l) in data.samples.rows().into_iter().zip(&data.labels) {
        let mut rec: Vec<String> = row.iter().map(|v| format_number(*v)).collect();
        rec.push(data.class_names[l].clone());
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Shortest decimal that round-trips; integers print without a fraction.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        "?".to_string()
    } else {
        format!("{v}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn toy(samples: Array2<f64>, labels: Vec<usize>, classes: usize) -> Dataset {
        let n = samples.ncols();
        Dataset::new(
            samples,
            labels,
            (0..n).map(|j| format!("f{j}")).collect(),
            (0..classes).map(|c| format!("c{c}")).collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_row_file() {
        let d = parse_csv("1.0,2.0,A\n", &CsvOptions::default()).unwrap();
        assert_eq!((d.n_samples(), d.n_features(), d.n_classes()), (1, 2, 1));
    }

    #[test]
    fn labels_follow_first_seen_order() {
        let d = parse_csv("1,B\n2,A\n3,B\n", &CsvOptions::default()).unwrap();
        assert_eq!(d.class_names, vec!["B", "A"]);
        assert_eq!(d.labels, vec![0, 1, 0]);
        assert_eq!(d.signed_labels(), vec![1.0, -1.0, 1.0]);
    }

    #[test]
    fn header_and_class_column() {
        let opts = CsvOptions {
            class_column: Some(0),
            has_header: true,
            ..Default::default()
        };
        let d = parse_csv("cls,a,b\nx,1,2\ny,3,4\n", &opts).unwrap();
        assert_eq!(d.feature_names, vec!["a", "b"]);
        assert_eq!(d.samples, array![[1.0, 2.0], [3.0, 4.0]]);
    }

    #[test]
    fn csv_errors() {
        let opts = CsvOptions::default();
        assert!(matches!(
            parse_csv("1,2,A\n1,A\n", &opts),
            Err(Error::MalformedRow { line: 2, .. })
        ));
        assert!(matches!(
            parse_csv("1,zz,A\n", &opts),
            Err(Error::BadNumber { column: 1, .. })
        ));
        assert!(matches!(parse_csv("", &opts), Err(Error::Empty(_))));
    }

    #[test]
    fn missing_marker_then_impute() {
        let d = parse_csv("1,A\n?,A\n3,A\n", &CsvOptions::default()).unwrap();
        assert!(d.samples[(1, 0)].is_nan());
        let f = impute_class_mean(&d).unwrap();
        assert_eq!(f.samples[(1, 0)], 2.0);
        assert!(!f.has_missing());
    }

    #[test]
    fn impute_uses_own_class_mean() {
        // class 0: {1, 3}; class 1: {10, ?, 20}; pooled mean would be 8.5
        let d = toy(
            array![[1.0], [3.0], [10.0], [f64::NAN], [20.0]],
            vec![0, 0, 1, 1, 1],
            2,
        );
        let f = impute_class_mean(&d).unwrap();
        assert_eq!(f.samples[(3, 0)], 15.0);
        assert_eq!(f.samples[(0, 0)], 1.0);
    }

    #[test]
    fn impute_without_missing_is_identity_and_all_missing_errors() {
        let d = toy(array![[1.0], [2.0]], vec![0, 1], 2);
        assert_eq!(impute_class_mean(&d).unwrap(), d);
        let bad = toy(array![[1.0], [f64::NAN]], vec![0, 1], 2);
        assert!(matches!(
            impute_class_mean(&bad),
            Err(Error::AllMissing { .. })
        ));
    }

    #[test]
    fn standardize_conventions() {
        let train = toy(array![[0.0, 5.0], [2.0, 5.0]], vec![0, 1], 2);
        let test = toy(array![[10.0, 7.0]], vec![0], 2);
        let (a, b, scaler) = standardize(&train, &test).unwrap();
        assert_eq!(a.samples, array![[-1.0, 0.0], [1.0, 0.0]]);
        assert_eq!(scaler.scale[1], 1.0);
        assert_eq!(b.samples[(0, 0)], 9.0);
        assert!(standardize(&test, &test).is_err());
    }

    #[test]
    fn parity_generator() {
        let p2 = generate_parity(2).unwrap();
        assert_eq!(p2.samples, array![[0., 0.], [0., 1.], [1., 0.], [1., 1.]]);
        assert_eq!(p2.labels, vec![0, 1, 1, 0]);
        let p8 = generate_parity(8).unwrap();
        assert_eq!(p8.n_samples(), 256);
        assert_eq!(p8.class_counts(), vec![128, 128]);
        assert_eq!(generate_parity(3).unwrap().class_counts(), vec![4, 4]);
        assert!(generate_parity(1).is_err());
        assert!(generate_parity(21).is_err());
    }

    #[test]
    fn parity_label_is_popcount_mod_two() {
        for bits in 2..=12 {
            let d = generate_parity(bits).unwrap();
            for (row, &l) in d.samples.rows().into_iter().zip(&d.labels) {
                let ones = row.iter().filter(|&&v| v == 1.0).count();
                assert_eq!(ones % 2, l);
            }
        }
    }

    #[test]
    fn folds_balanced_50_50() {
        let labels: Vec<usize> = (0..100).map(|i| i % 2).collect();
        let plan = stratified_folds(&labels, 2, 10, 3).unwrap();
        for f in 0..10 {
            let (_, test) = plan.split(f);
            let ones = test.iter().filter(|&&i| labels[i] == 1).count();
            assert_eq!((test.len(), ones), (10, 5));
        }
        assert_eq!(plan, stratified_folds(&labels, 2, 10, 3).unwrap());
    }

    #[test]
    fn folds_85_21() {
        let labels: Vec<usize> = (0..106).map(|i| usize::from(i >= 85)).collect();
        let plan = stratified_folds(&labels, 2, 10, 11).unwrap();
        for f in 0..10 {
            let (_, test) = plan.split(f);
            let c0 = test.iter().filter(|&&i| labels[i] == 0).count();
            let c1 = test.len() - c0;
            assert!(c0 == 8 || c0 == 9, "fold {f}: {c0}");
            assert!(c1 == 2 || c1 == 3, "fold {f}: {c1}");
        }
    }

    #[test]
    fn fold_errors() {
        let labels = vec![0, 1, 0];
        assert!(stratified_folds(&labels, 2, 4, 0).is_err());
        assert!(stratified_folds(&labels, 2, 1, 0).is_err());
    }

    #[test]
    fn manifest_parsing() {
        let m = Manifest::parse(
            "# heart\nname=heart\npath=heart.csv\nclass_column=last\nhas_header=false\nmissing_marker=?\n",
            Path::new("/data"),
        )
        .unwrap();
        assert_eq!(m.path, PathBuf::from("/data/heart.csv"));
        assert_eq!(m.csv.class_column, None);
        assert!(Manifest::parse("bogus=1\npath=x", Path::new(".")).is_err());
        assert!(Manifest::parse("name=x", Path::new(".")).is_err());
    }
}
