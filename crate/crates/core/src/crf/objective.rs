//! Regularized negative log-likelihood and its gradient.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::model::{CrfModel, TrainConfig};
use super::CrfError;
use crate::features::FeatureVector;

/// One training sentence with features and gold labels resolved to ids.
#[derive(Debug, Clone)]
pub(crate) struct Instance {
    pub ids: Vec<Vec<u32>>,
    pub gold: Vec<usize>,
}

pub(crate) fn compile(
    model: &CrfModel,
    batch: &[(Vec<FeatureVector>, Vec<String>)],
) -> Result<Vec<Instance>, CrfError> {
    batch
        .iter()
        .map(|(vectors, gold)| {
            if vectors.len() != gold.len() {
                return Err(CrfError::LengthMismatch {
                    features: vectors.len(),
                    labels: gold.len(),
                });
            }
            if vectors.is_empty() {
                return Err(CrfError::EmptySequence);
            }
            let gold = gold
                .iter()
                .map(|label| {
                    model.labels().get(label).ok_or_else(|| CrfError::UnknownLabel {
                        label: label.to_string(),
                    })
                })
                .collect::<Result<_, _>>()?;
            Ok(Instance {
                ids: model.feature_ids(vectors),
                gold,
            })
        })
        .collect()
}

/// Objective at `weights`, with the gradient written into `grad`.
///
/// Sentences are accumulated strictly in order so results are bit-identical
/// across runs.
pub(crate) fn evaluate(
    model: &CrfModel,
    weights: &[f64],
    instances: &[Instance],
    sigma: f64,
    grad: &mut [f64],
) -> f64 {
    let inv_var = 1.0 / (sigma * sigma);
    let mut objective = 0.0;
    for (g, w) in grad.iter_mut().zip(weights) {
        *g = w * inv_var;
        objective += w * w;
    }
    objective *= 0.5 * inv_var;

    let k = model.labels().len();
    for instance in instances {
        let lattice = model.lattice_from_ids(weights, &instance.ids);
        let (marginals, log_z) = lattice.marginals();
        objective += log_z - lattice.sequence_score(&instance.gold);

        for (t, active) in instance.ids.iter().enumerate() {
            let gold = instance.gold[t];
            for &f in active {
                let base = model.emission_index(f, 0);
                let row = &mut grad[base..base + k];
                for (label, g) in row.iter_mut().enumerate() {
                    *g += marginals.node(t, label);
                }
                row[gold] -= 1.0;
            }
        }
        for label in 0..k {
            grad[model.start_index(label)] += marginals.node(0, label);
        }
        grad[model.start_index(instance.gold[0])] -= 1.0;
        for t in 1..instance.ids.len() {
            for from in 0..k {
                for to in 0..k {
                    grad[model.transition_index(from, to)] += marginals.edge(t, from, to);
                }
            }
            grad[model.transition_index(instance.gold[t - 1], instance.gold[t])] -= 1.0;
        }
    }
    objective
}

/// `Σ (log Z − gold score) + ‖w‖²/(2σ²)` over `batch` at the model's
/// current weights, with its gradient.
pub fn nll_and_gradient(
    model: &CrfModel,
    batch: &[(Vec<FeatureVector>, Vec<String>)],
    cfg: &TrainConfig,
) -> Result<(f64, Vec<f64>), CrfError> {
    cfg.validate()?;
    let instances = compile(model, batch)?;
    let mut grad = vec![0.0; model.weights().len()];
    let objective = evaluate(model, model.weights(), &instances, cfg.l2_sigma, &mut grad);
    Ok((objective, grad))
}
