//! Support feature machines.
//!
//! The input space of a dataset is extended with explicitly constructed
//! "support features" before a simple learner is trained on the result:
//!
//! - Gaussian kernel features anchored at training vectors,
//! - projections on random directions,
//! - binary window features marking pure single-class clusters of a
//!   projection.
//!
//! Generated features are filtered with mutual information and local
//! class-posterior tests ([`selection`]) and handed to any of the
//! learners in [`learners`]. [`harness`] runs the cross-validated
//! experimental protocol end to end.
//!
//! ## Feature flags
//!
//! - `parallel` (default) runs folds, grid cells, per-feature scoring and
//!   row transforms on the rayon thread pool. Without it every loop runs
//!   sequentially and results are identical.

#[macro_use]
mod par;

pub mod dataset;
pub mod error;
pub mod features;
pub mod harness;
pub mod learners;
pub mod model_io;
pub mod selection;
pub mod stats;

pub use dataset::{Dataset, FoldPlan, Manifest, Scaler};
pub use error::{Error, Result};
pub use features::{Family, FamilySet, FeatureDef, FeatureSpace, GenParams};
pub use harness::{ClassifierKind, DatasetSpec, ExperimentConfig, ExperimentResult};
pub use model_io::Model;
pub use selection::SelectionReport;

/// Derive an independent stream seed from a base seed and a tag (splitmix64).
pub fn derive_seed(base: u64, tag: u64) -> u64 {
    let mut z = base
        .wrapping_add(tag.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
