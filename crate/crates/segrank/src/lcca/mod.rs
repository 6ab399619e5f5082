//! Latent-class clustering over factor scores: diagonal-covariance Gaussian
//! mixtures fitted by best-of-restarts EM, information-criterion model
//! selection and passive covariate profiling.

mod em;
mod profile;

pub use em::{fit_em, EmDiagnostics, EmOptions, FitStats, LatentClassModel, RestartSummary};
pub use profile::{
    adjusted_rand_index, assign_classes, class_factor_means, profile_covariates,
    ClassAssignment, CovariateProfile,
};

use crate::efa::FactorScores;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LccaError {
    #[error("class count must be at least 1")]
    BadClassCount,
    #[error("need at least {needed} score rows for this class count, have {have}")]
    TooFewRows { needed: usize, have: usize },
    #[error("every restart collapsed to a degenerate component")]
    AllRestartsDegenerate,
    #[error("no class count in the range could be fitted")]
    NoUsableModel,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("unknown covariate: {0}")]
    UnknownCovariate(String),
    #[error("model file error: {0}")]
    ModelFile(String),
}

/// Posterior class responsibilities; each row is non-negative and sums to 1.
#[derive(Debug, Clone)]
pub struct PosteriorMatrix {
    pub respondent_ids: Vec<String>,
    pub responsibilities: DMatrix<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelectionCriterion {
    Bic,
    Aic,
}

impl SelectionCriterion {
    fn value(&self, fit: &FitStats) -> f64 {
        match self {
            SelectionCriterion::Bic => fit.bic,
            SelectionCriterion::Aic => fit.aic,
        }
    }
}

/// One row of the model-comparison table.
#[derive(Debug, Clone)]
pub struct ComparisonRow {
    pub k: usize,
    pub log_likelihood: Option<f64>,
    pub n_parameters: Option<usize>,
    pub aic: Option<f64>,
    pub bic: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SelectedModel {
    pub model: LatentClassModel,
    pub posterior: PosteriorMatrix,
    pub diagnostics: EmDiagnostics,
    pub comparison: Vec<ComparisonRow>,
}

/// Fit every class count in `k_range` and keep the criterion minimizer
/// (ties to the smaller count). Per-count failures are recorded in the
/// comparison table and only fatal when nothing fits.
pub fn select_model(
    scores: &FactorScores,
    k_range: std::ops::RangeInclusive<usize>,
    criterion: SelectionCriterion,
    options: &EmOptions,
) -> Result<SelectedModel, LccaError> {
    let mut comparison = Vec::new();
    let mut best: Option<SelectedModel> = None;
    for k in k_range {
        match fit_em(scores, k, options) {
            Ok((model, posterior, diagnostics)) => {
                comparison.push(ComparisonRow {
                    k,
                    log_likelihood: Some(model.fit.log_likelihood),
                    n_parameters: Some(model.fit.n_parameters),
                    aic: Some(model.fit.aic),
                    bic: Some(model.fit.bic),
                    error: None,
                });
                let better = match &best {
                    None => true,
                    Some(current) => {
                        criterion.value(&model.fit) < criterion.value(&current.model.fit)
                    }
                };
                if better {
                    best = Some(SelectedModel {
                        model,
                        posterior,
                        diagnostics,
                        comparison: Vec::new(),
                    });
                }
            }
            Err(err) => comparison.push(ComparisonRow {
                k,
                log_likelihood: None,
                n_parameters: None,
                aic: None,
                bic: None,
                error: Some(err.to_string()),
            }),
        }
    }
    let mut selected = best.ok_or(LccaError::NoUsableModel)?;
    selected.comparison = comparison;
    Ok(selected)
}
