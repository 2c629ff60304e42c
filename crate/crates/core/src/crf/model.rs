use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::alphabet::{FeatureAlphabet, LabelAlphabet};
use super::lattice::Lattice;
use super::CrfError;
use crate::features::{FeatureVector, TemplateConfig};

/// Version of the model layout; bumped whenever saved models stop being
/// loadable by older code.
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskKind {
    Pos,
    Chunk,
}

impl TaskKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TaskKind::Pos => "pos",
            TaskKind::Chunk => "chunk",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    /// Standard deviation of the Gaussian prior on every weight.
    pub l2_sigma: f64,
    pub max_iterations: usize,
    /// Stop when the relative objective change falls below this.
    pub convergence_tol: f64,
    /// Drop features seen fewer times than this (0 and 1 keep everything).
    pub feature_cutoff: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            l2_sigma: 1.0,
            max_iterations: 200,
            convergence_tol: 1e-5,
            feature_cutoff: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), CrfError> {
        let bad = |field| Err(CrfError::InvalidConfig { field });
        if !(self.l2_sigma.is_finite() && self.l2_sigma > 0.0) {
            return bad("l2_sigma");
        }
        if self.max_iterations == 0 {
            return bad("max_iterations");
        }
        if !(self.convergence_tol.is_finite() && self.convergence_tol > 0.0) {
            return bad("convergence_tol");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelMetadata {
    pub train: TrainConfig,
    pub iterations: usize,
    pub objective: f64,
    pub converged: bool,
    /// Free-form resolved run configuration, echoed for reproducibility.
    pub run_config: String,
}

impl Default for ModelMetadata {
    fn default() -> Self {
        ModelMetadata {
            train: TrainConfig::default(),
            iterations: 0,
            objective: 0.0,
            converged: false,
            run_config: String::new(),
        }
    }
}

/// A first-order linear-chain CRF.
///
/// Weights are one flat vector: emission weights `[feature × label]`, then
/// transitions `[from × to]`, then start weights `[label]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrfModel {
    labels: LabelAlphabet,
    features: FeatureAlphabet,
    template: TemplateConfig,
    weights: Vec<f64>,
    pub metadata: ModelMetadata,
}

pub(crate) fn weight_count(features: usize, labels: usize) -> usize {
    features * labels + labels * labels + labels
}

impl CrfModel {
    pub fn new(
        labels: LabelAlphabet,
        features: FeatureAlphabet,
        template: TemplateConfig,
        weights: Vec<f64>,
        metadata: ModelMetadata,
    ) -> Result<Self, CrfError> {
        let expected = weight_count(features.len(), labels.len());
        if weights.len() != expected {
            return Err(CrfError::WeightShape {
                expected,
                found: weights.len(),
            });
        }
        if let Some(index) = weights.iter().position(|w| !w.is_finite()) {
            return Err(CrfError::NonFiniteWeight { index });
        }
        Ok(CrfModel {
            labels,
            features,
            template,
            weights,
            metadata,
        })
    }

    pub fn zeros(labels: LabelAlphabet, features: FeatureAlphabet, template: TemplateConfig) -> Self {
        let weights = vec![0.0; weight_count(features.len(), labels.len())];
        CrfModel {
            labels,
            features,
            template,
            weights,
            metadata: ModelMetadata::default(),
        }
    }

    pub fn task(&self) -> TaskKind {
        match self.template {
            TemplateConfig::Pos(_) => TaskKind::Pos,
            TemplateConfig::Chunk(_) => TaskKind::Chunk,
        }
    }

    pub fn labels(&self) -> &LabelAlphabet {
        &self.labels
    }

    pub fn features(&self) -> &FeatureAlphabet {
        &self.features
    }

    pub fn template(&self) -> &TemplateConfig {
        &self.template
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Mutable weights. Callers keep them finite.
    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub(crate) fn set_weights(&mut self, weights: Vec<f64>) {
        debug_assert_eq!(weights.len(), self.weights.len());
        self.weights = weights;
    }

    fn emission_len(&self) -> usize {
        self.features.len() * self.labels.len()
    }

    pub fn emission(&self, feature: u32, label: usize) -> f64 {
        self.weights[feature as usize * self.labels.len() + label]
    }

    pub fn transition(&self, from: usize, to: usize) -> f64 {
        self.weights[self.emission_len() + from * self.labels.len() + to]
    }

    pub fn start(&self, label: usize) -> f64 {
        let k = self.labels.len();
        self.weights[self.emission_len() + k * k + label]
    }

    pub fn emission_index(&self, feature: u32, label: usize) -> usize {
        feature as usize * self.labels.len() + label
    }

    pub fn transition_index(&self, from: usize, to: usize) -> usize {
        self.emission_len() + from * self.labels.len() + to
    }

    pub fn start_index(&self, label: usize) -> usize {
        let k = self.labels.len();
        self.emission_len() + k * k + label
    }

    /// Feature ids active at each position; unknown features are dropped.
    pub fn feature_ids(&self, vectors: &[FeatureVector]) -> Vec<Vec<u32>> {
        vectors
            .iter()
            .map(|fv| fv.features.iter().filter_map(|f| self.features.get(f)).collect())
            .collect()
    }

    pub(crate) fn lattice_from_ids(&self, weights: &[f64], ids: &[Vec<u32>]) -> Lattice {
        let k = self.labels.len();
        let emission = self.emission_len();
        let mut node = vec![0.0; ids.len() * k];
        for (t, active) in ids.iter().enumerate() {
            let row = &mut node[t * k..(t + 1) * k];
            for &f in active {
                let w = &weights[f as usize * k..(f as usize + 1) * k];
                for (score, weight) in row.iter_mut().zip(w) {
                    *score += weight;
                }
            }
        }
        let transition = weights[emission..emission + k * k].to_vec();
        let start = weights[emission + k * k..].to_vec();
        Lattice::new(ids.len(), k, node, transition, start)
    }

    pub fn score_lattice(&self, vectors: &[FeatureVector]) -> Lattice {
        self.lattice_from_ids(&self.weights, &self.feature_ids(vectors))
    }

    pub fn viterbi(&self, vectors: &[FeatureVector]) -> (Vec<String>, f64) {
        let (path, score) = self.score_lattice(vectors).viterbi();
        (
            path.into_iter().map(|k| self.labels.label(k).into()).collect(),
            score,
        )
    }

    /// Extracts features with the model's own templates and decodes.
    pub fn decode(&self, tokens: &[&str], pos_tags: Option<&[&str]>) -> Result<Vec<String>, CrfError> {
        if tokens.is_empty() {
            return Ok(Vec::new());
        }
        let vectors = crate::features::extract(&self.template, tokens, pos_tags)?;
        Ok(self.viterbi(&vectors).0)
    }

    pub fn weight_norm(&self) -> f64 {
        libm::sqrt(self.weights.iter().map(|w| w * w).sum())
    }
}
