//! Posterior-weighted class profiles: factor means and passive covariates.

use super::{LccaError, PosteriorMatrix};
use crate::efa::FactorScores;
use crate::survey::{CovariateKind, CovariateValue, SurveyDataset};
use nalgebra::DMatrix;

/// Modal class assignment derived from a posterior matrix.
#[derive(Debug, Clone)]
pub struct ClassAssignment {
    /// Zero-based modal class per respondent.
    pub classes: Vec<usize>,
    /// Modal share per class (percent).
    pub shares: Vec<f64>,
    /// Respondents whose posterior had a tie for the top class (resolved to
    /// the lower index).
    pub ties: Vec<String>,
}

/// Argmax class per respondent; ties go to the lower class index and are
/// recorded.
pub fn assign_classes(post: &PosteriorMatrix) -> ClassAssignment {
    let n = post.responsibilities.nrows();
    let k = post.responsibilities.ncols();
    let mut classes = Vec::with_capacity(n);
    let mut counts = vec![0usize; k];
    let mut ties = Vec::new();
    for i in 0..n {
        let mut best = 0usize;
        let mut tied = false;
        for c in 1..k {
            let current = post.responsibilities[(i, c)];
            let leader = post.responsibilities[(i, best)];
            if current > leader {
                best = c;
                tied = false;
            } else if current == leader {
                tied = true;
            }
        }
        if tied {
            ties.push(post.respondent_ids[i].clone());
        }
        counts[best] += 1;
        classes.push(best);
    }
    let shares = counts
        .iter()
        .map(|&c| 100.0 * c as f64 / n as f64)
        .collect();
    ClassAssignment {
        classes,
        shares,
        ties,
    }
}

/// Posterior-weighted factor means per class (K x m).
pub fn class_factor_means(
    post: &PosteriorMatrix,
    scores: &FactorScores,
) -> Result<DMatrix<f64>, LccaError> {
    let n = scores.n();
    let m = scores.factor_count;
    let k = post.responsibilities.ncols();
    if post.responsibilities.nrows() != n {
        return Err(LccaError::ShapeMismatch(format!(
            "posterior has {} rows for {n} score rows",
            post.responsibilities.nrows()
        )));
    }
    let mut means = DMatrix::zeros(k, m);
    for c in 0..k {
        let nk: f64 = (0..n).map(|i| post.responsibilities[(i, c)]).sum();
        for j in 0..m {
            let acc: f64 = (0..n)
                .map(|i| post.responsibilities[(i, c)] * scores.scores[(i, j)])
                .sum();
            means[(c, j)] = acc / nk;
        }
    }
    Ok(means)
}

/// Class-conditional summary of one passive covariate.
#[derive(Debug, Clone)]
pub enum CovariateProfile {
    Categorical {
        code: String,
        levels: Vec<String>,
        /// Posterior-weighted percentage of each level, one row per class.
        class_shares: Vec<Vec<f64>>,
        /// Unweighted overall percentages.
        overall: Vec<f64>,
    },
    Continuous {
        code: String,
        class_means: Vec<f64>,
        overall: f64,
    },
}

impl CovariateProfile {
    pub fn code(&self) -> &str {
        match self {
            CovariateProfile::Categorical { code, .. } => code,
            CovariateProfile::Continuous { code, .. } => code,
        }
    }
}

/// Posterior-weighted covariate profiles per class. Covariates never enter
/// the fitted model; this is purely posterior description. Respondents with
/// a missing covariate value are excluded from that covariate's tallies.
pub fn profile_covariates(
    post: &PosteriorMatrix,
    ds: &SurveyDataset,
    covariates: &[String],
) -> Result<Vec<CovariateProfile>, LccaError> {
    let n = ds.len();
    let k = post.responsibilities.ncols();
    if post.responsibilities.nrows() != n {
        return Err(LccaError::ShapeMismatch(format!(
            "posterior has {} rows for {n} records",
            post.responsibilities.nrows()
        )));
    }
    let mut profiles = Vec::new();
    for code in covariates {
        let spec = ds
            .schema
            .covariate(code)
            .ok_or_else(|| LccaError::UnknownCovariate(code.clone()))?;
        match &spec.kind {
            CovariateKind::Categorical { levels } => {
                let mut class_level = vec![vec![0.0f64; levels.len()]; k];
                let mut class_total = vec![0.0f64; k];
                let mut overall = vec![0.0f64; levels.len()];
                let mut observed = 0usize;
                for (i, record) in ds.records.iter().enumerate() {
                    let Some(CovariateValue::Categorical(value)) = record.covariate(code) else {
                        continue;
                    };
                    let li = levels
                        .iter()
                        .position(|l| l == value)
                        .expect("level validated at load");
                    observed += 1;
                    overall[li] += 1.0;
                    for c in 0..k {
                        class_level[c][li] += post.responsibilities[(i, c)];
                        class_total[c] += post.responsibilities[(i, c)];
                    }
                }
                let class_shares: Vec<Vec<f64>> = (0..k)
                    .map(|c| {
                        class_level[c]
                            .iter()
                            .map(|&x| 100.0 * x / class_total[c].max(f64::MIN_POSITIVE))
                            .collect()
                    })
                    .collect();
                let overall: Vec<f64> = overall
                    .iter()
                    .map(|&x| 100.0 * x / (observed.max(1) as f64))
                    .collect();
                profiles.push(CovariateProfile::Categorical {
                    code: code.clone(),
                    levels: levels.clone(),
                    class_shares,
                    overall,
                });
            }
            CovariateKind::Continuous { .. } => {
                let mut class_acc = vec![0.0f64; k];
                let mut class_total = vec![0.0f64; k];
                let mut overall_acc = 0.0f64;
                let mut observed = 0usize;
                for (i, record) in ds.records.iter().enumerate() {
                    let Some(CovariateValue::Continuous(value)) = record.covariate(code) else {
                        continue;
                    };
                    observed += 1;
                    overall_acc += value;
                    for c in 0..k {
                        class_acc[c] += post.responsibilities[(i, c)] * value;
                        class_total[c] += post.responsibilities[(i, c)];
                    }
                }
                profiles.push(CovariateProfile::Continuous {
                    code: code.clone(),
                    class_means: (0..k)
                        .map(|c| class_acc[c] / class_total[c].max(f64::MIN_POSITIVE))
                        .collect(),
                    overall: overall_acc / observed.max(1) as f64,
                });
            }
        }
    }
    Ok(profiles)
}

/// Adjusted Rand index between two labelings (chance-corrected agreement).
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len(), "labelings must be the same length");
    let n = a.len();
    let ka = a.iter().max().map_or(0, |&x| x + 1);
    let kb = b.iter().max().map_or(0, |&x| x + 1);
    let mut table = vec![vec![0u64; kb]; ka];
    for (&x, &y) in a.iter().zip(b) {
        table[x][y] += 1;
    }
    let choose2 = |x: u64| -> f64 { (x * x.saturating_sub(1)) as f64 / 2.0 };
    let mut sum_ij = 0.0;
    let mut row_sums = vec![0u64; ka];
    let mut col_sums = vec![0u64; kb];
    for (i, row) in table.iter().enumerate() {
        for (j, &cell) in row.iter().enumerate() {
            sum_ij += choose2(cell);
            row_sums[i] += cell;
            col_sums[j] += cell;
        }
    }
    let sum_a: f64 = row_sums.iter().map(|&x| choose2(x)).sum();
    let sum_b: f64 = col_sums.iter().map(|&x| choose2(x)).sum();
    let total = choose2(n as u64);
    let expected = sum_a * sum_b / total;
    let max = 0.5 * (sum_a + sum_b);
    if (max - expected).abs() < 1e-12 {
        return 1.0;
    }
    (sum_ij - expected) / (max - expected)
}
