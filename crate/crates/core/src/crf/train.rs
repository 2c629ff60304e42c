use alloc::string::String;
use alloc::vec::Vec;

use super::alphabet::{FeatureAlphabet, LabelAlphabet};
use super::lbfgs::{self, LbfgsConfig};
use super::model::{CrfModel, ModelMetadata, TrainConfig};
use super::objective::{compile, evaluate};
use super::CrfError;
use crate::features::{FeatureVector, TemplateConfig};

const LBFGS_HISTORY: usize = 10;

/// Objective values seen during training, for diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

pub fn train(
    data: &[(Vec<FeatureVector>, Vec<String>)],
    labels: LabelAlphabet,
    template: TemplateConfig,
    cfg: &TrainConfig,
) -> Result<CrfModel, CrfError> {
    train_with_report(data, labels, template, cfg).map(|(model, _)| model)
}

/// Full-batch L-BFGS on the regularized negative log-likelihood, starting
/// from zero weights.
pub fn train_with_report(
    data: &[(Vec<FeatureVector>, Vec<String>)],
    labels: LabelAlphabet,
    template: TemplateConfig,
    cfg: &TrainConfig,
) -> Result<(CrfModel, TrainReport), CrfError> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(CrfError::EmptyTrainingSet);
    }
    let features = FeatureAlphabet::build(
        data.iter()
            .flat_map(|(vectors, _)| vectors.iter())
            .flat_map(|fv| fv.features.iter().map(String::as_str)),
        cfg.feature_cutoff,
    );
    let mut model = CrfModel::zeros(labels, features, template);
    let instances = compile(&model, data)?;

    let result = lbfgs::minimize(
        model.weights().to_vec(),
        &LbfgsConfig {
            history: LBFGS_HISTORY,
            max_iterations: cfg.max_iterations,
            tolerance: cfg.convergence_tol,
        },
        |weights, grad| evaluate(&model, weights, &instances, cfg.l2_sigma, grad),
    )?;
    model.set_weights(result.x);
    model.metadata = ModelMetadata {
        train: *cfg,
        iterations: result.iterations,
        objective: result.objective,
        converged: result.converged,
        run_config: String::new(),
    };
    Ok((
        model,
        TrainReport {
            trace: result.trace,
            iterations: result.iterations,
            converged: result.converged,
        },
    ))
}
