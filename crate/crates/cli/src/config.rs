//! TOML experiment files.
//!
//! ```toml
//! dataset = "ionosphere"          # manifest path or name, parity<N>, gaussians
//! classifier = "sfm"
//! families = "K+H"
//! folds = 10
//! seed = 0
//!
//! [params]
//! eta = 10
//! beta = 0.03125
//!
//! [tuning]
//! linear_c = [0.25, 1.0, 4.0]
//! ```
//!
//! `table` files list `datasets` and `combos` instead of `dataset` and
//! `families`; `sweep` files add a `[sweep]` section with the grid.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use sfm_core::{ClassifierKind, DatasetSpec, ExperimentConfig, FamilySet, GenParams};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub dataset: Option<String>,
    #[serde(default)]
    pub datasets: Vec<String>,
    pub classifier: Option<String>,
    pub families: Option<String>,
    #[serde(default)]
    pub combos: Vec<String>,
    pub folds: Option<usize>,
    pub repeats: Option<usize>,
    pub seed: Option<u64>,
    pub fda_keep: Option<usize>,
    /// Fraction of m kernel features to aim for; 0 disables calibration.
    pub retention: Option<f64>,
    #[serde(default)]
    pub params: ParamsSection,
    #[serde(default)]
    pub tuning: TuningSection,
    pub sweep: Option<SweepSection>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    pub directions: Option<usize>,
    pub eta: Option<usize>,
    pub alpha: Option<f64>,
    pub delta: Option<f64>,
    pub beta: Option<f64>,
    pub epsilon: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TuningSection {
    pub linear_c: Option<Vec<f64>>,
    pub svm_c: Option<Vec<f64>>,
    pub svm_beta: Option<Vec<f64>>,
    pub inner_folds: Option<usize>,
    pub knn_k_max: Option<usize>,
    pub tree_max_depth: Option<usize>,
    pub tree_min_leaf: Option<usize>,
    pub tune_tree_depth: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub alphas: Vec<f64>,
    pub deltas: Vec<f64>,
    /// Points per class for the two-Gaussian data.
    pub per_class: Option<usize>,
}

/// Where relative dataset references are looked up.
pub struct Resolver {
    pub base: PathBuf,
    pub data_dir: Option<PathBuf>,
}

impl Resolver {
    pub fn new(config_path: &Path) -> Resolver {
        Resolver {
            base: config_path
                .parent()
                .map(Path::to_path_buf)
                .unwrap_or_default(),
            data_dir: std::env::var_os("SFM_DATA_DIR").map(PathBuf::from),
        }
    }

    /// `parity<N>` and `gaussians` are generated; anything else names a
    /// manifest, tried as given, next to the config, then under
    /// `SFM_DATA_DIR`, each with and without a `.manifest` suffix.
    pub fn resolve(&self, name: &str, seed: u64) -> DatasetSpec {
        match name.parse::<DatasetSpec>() {
            Ok(DatasetSpec::Manifest(_)) | Err(_) => {}
            Ok(DatasetSpec::TwoGaussians { per_class, .. }) => {
                return DatasetSpec::TwoGaussians { per_class, seed };
            }
            Ok(generated) => return generated,
        }
        let given = PathBuf::from(name);
        let mut candidates = Vec::new();
        if given.is_absolute() {
            candidates.push(given.clone());
        } else {
            candidates.push(self.base.join(&given));
            if let Some(dir) = &self.data_dir {
                candidates.push(dir.join(&given));
            }
        }
        for c in candidates.clone() {
            if c.extension().is_none() {
                candidates.push(c.with_extension("manifest"));
            }
        }
        let found = candidates.iter().find(|c| c.is_file()).cloned();
        DatasetSpec::Manifest(found.unwrap_or_else(|| candidates.swap_remove(0)))
    }
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<FileConfig> {
        Ok(toml::from_str(text)?)
    }

    pub fn classifier(&self) -> Result<ClassifierKind> {
        match &self.classifier {
            Some(c) => c.parse().map_err(anyhow::Error::from),
            None => Ok(ClassifierKind::SfmLinear),
        }
    }

    /// Experiment settings shared by every command; the dataset is filled
    /// in by the caller.
    pub fn experiment(&self, seed: u64, dataset: DatasetSpec) -> Result<ExperimentConfig> {
        let classifier = self.classifier()?;
        let families: FamilySet = self.families.as_deref().unwrap_or("X").parse()?;
        let mut c = ExperimentConfig::new(dataset, classifier, families);
        c.seed = seed;
        if let Some(v) = self.folds {
            c.folds = v;
        }
        if let Some(v) = self.repeats {
            c.repeats = v;
        }
        c.fda_keep = self.fda_keep;
        match self.retention {
            Some(r) if r == 0.0 => c.retention = None,
            Some(r) => c.retention = Some(r),
            None => {}
        }
        c.params = self.gen_params(seed);
        let t = &self.tuning;
        if let Some(v) = &t.linear_c {
            c.linear_c_grid = v.clone();
        }
        if let Some(v) = &t.svm_c {
            c.svm_c_grid = v.clone();
        }
        if let Some(v) = &t.svm_beta {
            c.svm_beta_grid = v.clone();
        }
        if let Some(v) = t.inner_folds {
            c.inner_folds = v;
        }
        if let Some(v) = t.knn_k_max {
            c.knn_k_max = v;
        }
        if let Some(v) = t.tree_max_depth {
            c.tree.max_depth = v;
        }
        if let Some(v) = t.tree_min_leaf {
            c.tree.min_leaf = v;
        }
        if let Some(v) = t.tune_tree_depth {
            c.tune_tree_depth = v;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn gen_params(&self, seed: u64) -> GenParams {
        let d = GenParams::default();
        let p = &self.params;
        GenParams {
            n_directions: p.directions.or(d.n_directions),
            eta: p.eta.unwrap_or(d.eta),
            alpha: p.alpha.unwrap_or(d.alpha),
            delta: p.delta.unwrap_or(d.delta),
            beta: p.beta.unwrap_or(d.beta),
            epsilon: p.epsilon.unwrap_or(d.epsilon),
            seed,
        }
    }

    pub fn single_dataset(&self) -> Result<&str> {
        match (&self.dataset, self.datasets.as_slice()) {
            (Some(d), []) => Ok(d),
            (None, [d]) => Ok(d),
            (None, []) => bail!("config names no dataset"),
            _ => bail!("config names several datasets; use the table command"),
        }
    }

    pub fn dataset_list(&self) -> Vec<&str> {
        self.dataset
            .iter()
            .chain(&self.datasets)
            .map(String::as_str)
            .collect()
    }

    pub fn combo_list(&self) -> Result<Vec<FamilySet>> {
        let names: Vec<&str> = if self.combos.is_empty() {
            self.families.iter().map(String::as_str).collect()
        } else {
            self.combos.iter().map(String::as_str).collect()
        };
        if names.is_empty() {
            bail!("config names no family combinations");
        }
        names
            .into_iter()
            .map(|n| n.parse().map_err(anyhow::Error::from))
            .collect()
    }
}
