//! First-order linear-chain conditional random field: log-space
//! forward-backward, Viterbi decoding and L2-regularized maximum-likelihood
//! training with L-BFGS.

mod alphabet;
mod lattice;
pub mod lbfgs;
mod model;
mod objective;
mod train;

use alloc::string::String;
use alloc::vec::Vec;

pub use alphabet::{FeatureAlphabet, LabelAlphabet};
pub use lattice::{log_sum_exp, Lattice, Marginals};
pub use model::{CrfModel, ModelMetadata, TaskKind, TrainConfig, MODEL_VERSION};
pub use objective::nll_and_gradient;
pub use train::{train, train_with_report, TrainReport};

use crate::features::{FeatureError, FeatureVector};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CrfError {
    #[error("unknown label `{label}`")]
    UnknownLabel { label: String },
    #[error("duplicate label `{label}`")]
    DuplicateLabel { label: String },
    #[error("duplicate feature `{feature}`")]
    DuplicateFeature { feature: String },
    #[error("label alphabet is empty")]
    EmptyLabelAlphabet,
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("empty sequence")]
    EmptySequence,
    #[error("{features} feature vectors but {labels} labels")]
    LengthMismatch { features: usize, labels: usize },
    #[error("objective is not finite at iteration {iteration}")]
    NonFiniteObjective { iteration: usize },
    #[error("weight {index} is not finite")]
    NonFiniteWeight { index: usize },
    #[error("expected {expected} weights, found {found}")]
    WeightShape { expected: usize, found: usize },
    #[error("invalid training parameter `{field}`")]
    InvalidConfig { field: &'static str },
    #[error(transparent)]
    Feature(#[from] FeatureError),
}

pub fn score_lattice(model: &CrfModel, vectors: &[FeatureVector]) -> Lattice {
    model.score_lattice(vectors)
}

pub fn log_partition(lattice: &Lattice) -> f64 {
    lattice.log_partition()
}

pub fn viterbi(model: &CrfModel, vectors: &[FeatureVector]) -> (Vec<String>, f64) {
    model.viterbi(vectors)
}
