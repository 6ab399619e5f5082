//! Regression (Thurstone) factor scores: F = Z R^-1 S.

use super::{EfaError, FactorSolution};
use crate::linalg;
use crate::psych::pearson_correlation_matrix;
use crate::survey::SurveyDataset;
use nalgebra::DMatrix;

/// Standardized factor scores for every respondent.
#[derive(Debug, Clone)]
pub struct FactorScores {
    pub respondent_ids: Vec<String>,
    /// n x m, column means are exactly zero on the estimation sample.
    pub scores: DMatrix<f64>,
    pub factor_count: usize,
}

impl FactorScores {
    pub fn n(&self) -> usize {
        self.scores.nrows()
    }
}

/// Score the dataset with the solution's structure matrix: standardized item
/// responses times R^-1 S.
pub fn factor_scores(
    ds: &SurveyDataset,
    solution: &FactorSolution,
) -> Result<FactorScores, EfaError> {
    let items = &solution.items;
    let n = ds.len();
    let p = items.len();
    let m = solution.n_factors();

    let corr = pearson_correlation_matrix(ds, items)?;
    let r_inv = linalg::invert_symmetric(&corr.values)?;
    let weights = r_inv * &solution.structure; // p x m

    let mut z = DMatrix::zeros(n, p);
    for (j, code) in items.iter().enumerate() {
        let col = ds.item_values(code).map_err(crate::psych::PsychError::from)?;
        let mean = col.iter().sum::<f64>() / n as f64;
        let sd = (col.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>()
            / (n as f64 - 1.0))
            .sqrt();
        for (i, &x) in col.iter().enumerate() {
            z[(i, j)] = (x - mean) / sd;
        }
    }

    let mut scores = z * weights;
    // remove the residual float drift so column means are exactly zero
    for j in 0..m {
        let mean: f64 = scores.column(j).iter().sum::<f64>() / n as f64;
        for i in 0..n {
            scores[(i, j)] -= mean;
        }
    }

    Ok(FactorScores {
        respondent_ids: ds.records.iter().map(|r| r.respondent_id.clone()).collect(),
        scores,
        factor_count: m,
    })
}
