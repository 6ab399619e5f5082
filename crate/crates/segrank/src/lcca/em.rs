//! EM for diagonal-covariance Gaussian mixtures over factor scores.

use super::{LccaError, PosteriorMatrix};
use crate::efa::FactorScores;
use nalgebra::DMatrix;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

const LOG_2PI: f64 = 1.837_877_066_409_345_5;
/// Variance floor as a fraction of the pooled per-dimension variance.
const VARIANCE_FLOOR_FRACTION: f64 = 1e-6;
/// Iterations a component may sit at the floor before the restart is
/// declared degenerate.
const FLOOR_PATIENCE: usize = 10;

#[derive(Debug, Clone)]
pub struct EmOptions {
    pub restarts: usize,
    pub seed: u64,
    /// Absolute log-likelihood improvement below which EM stops.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for EmOptions {
    fn default() -> Self {
        Self {
            restarts: 20,
            seed: 0,
            tol: 1e-7,
            max_iter: 500,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitStats {
    pub log_likelihood: f64,
    pub aic: f64,
    pub bic: f64,
    pub n_parameters: usize,
    pub iterations: usize,
    pub converged: bool,
    pub seed: u64,
    pub restart_index: usize,
    pub n: usize,
}

/// Fitted latent-class (Gaussian profile) model. Classes are stored in
/// canonical order: descending mixing weight, ties broken by the mean
/// vector, which makes repeated fits with one seed byte-identical.
#[derive(Debug, Clone)]
pub struct LatentClassModel {
    pub k: usize,
    pub weights: Vec<f64>,
    /// K x m class means in factor-score units.
    pub means: DMatrix<f64>,
    /// K x m per-dimension variances.
    pub variances: DMatrix<f64>,
    pub fit: FitStats,
}

#[derive(Debug, Clone)]
pub struct RestartSummary {
    pub index: usize,
    pub log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
    pub degenerate: bool,
    /// True when the log-likelihood never decreased across iterations.
    pub monotone: bool,
}

#[derive(Debug, Clone)]
pub struct EmDiagnostics {
    /// Per-iteration log-likelihood of the winning restart.
    pub winner_trace: Vec<f64>,
    pub restarts: Vec<RestartSummary>,
}

struct RestartOutcome {
    weights: Vec<f64>,
    means: DMatrix<f64>,
    variances: DMatrix<f64>,
    responsibilities: DMatrix<f64>,
    trace: Vec<f64>,
    converged: bool,
    degenerate: bool,
    monotone: bool,
}

/// Best-of-restarts EM. Restarts are independent and may run in parallel;
/// the winner is picked deterministically (max log-likelihood, ties to the
/// lowest restart index).
pub fn fit_em(
    scores: &FactorScores,
    k: usize,
    options: &EmOptions,
) -> Result<(LatentClassModel, PosteriorMatrix, EmDiagnostics), LccaError> {
    let n = scores.n();
    let m = scores.factor_count;
    if k == 0 {
        return Err(LccaError::BadClassCount);
    }
    let needed = k * (2 * m + 1) + 1;
    if n < needed {
        return Err(LccaError::TooFewRows { needed, have: n });
    }

    let data = &scores.scores;
    let pooled: Vec<f64> = (0..m)
        .map(|j| {
            let mean: f64 = data.column(j).iter().sum::<f64>() / n as f64;
            data.column(j)
                .iter()
                .map(|&x| (x - mean) * (x - mean))
                .sum::<f64>()
                / n as f64
        })
        .collect();
    let floors: Vec<f64> = pooled
        .iter()
        .map(|&v| (v * VARIANCE_FLOOR_FRACTION).max(1e-12))
        .collect();

    let outcomes: Vec<RestartOutcome> = (0..options.restarts.max(1))
        .into_par_iter()
        .map(|restart| {
            let stream = options
                .seed
                .wrapping_add((restart as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            run_restart(data, k, m, &pooled, &floors, stream, options)
        })
        .collect();

    let mut best: Option<usize> = None;
    for (idx, outcome) in outcomes.iter().enumerate() {
        if outcome.degenerate {
            continue;
        }
        let ll = *outcome.trace.last().unwrap_or(&f64::NEG_INFINITY);
        let is_better = match best {
            None => true,
            Some(current) => ll > *outcomes[current].trace.last().unwrap(),
        };
        if is_better {
            best = Some(idx);
        }
    }
    let best = best.ok_or(LccaError::AllRestartsDegenerate)?;

    let diagnostics = EmDiagnostics {
        winner_trace: outcomes[best].trace.clone(),
        restarts: outcomes
            .iter()
            .enumerate()
            .map(|(index, o)| RestartSummary {
                index,
                log_likelihood: *o.trace.last().unwrap_or(&f64::NEG_INFINITY),
                iterations: o.trace.len(),
                converged: o.converged,
                degenerate: o.degenerate,
                monotone: o.monotone,
            })
            .collect(),
    };

    let winner = &outcomes[best];
    let log_likelihood = *winner.trace.last().unwrap();
    let n_parameters = (k - 1) + 2 * k * m;
    let fit = FitStats {
        log_likelihood,
        aic: -2.0 * log_likelihood + 2.0 * n_parameters as f64,
        bic: -2.0 * log_likelihood + n_parameters as f64 * (n as f64).ln(),
        n_parameters,
        iterations: winner.trace.len(),
        converged: winner.converged,
        seed: options.seed,
        restart_index: best,
        n,
    };

    let (model, responsibilities) = canonicalize(
        LatentClassModel {
            k,
            weights: winner.weights.clone(),
            means: winner.means.clone(),
            variances: winner.variances.clone(),
            fit,
        },
        winner.responsibilities.clone(),
    );

    Ok((
        model,
        PosteriorMatrix {
            respondent_ids: scores.respondent_ids.clone(),
            responsibilities,
        },
        diagnostics,
    ))
}

fn run_restart(
    data: &DMatrix<f64>,
    k: usize,
    m: usize,
    pooled: &[f64],
    floors: &[f64],
    stream: u64,
    options: &EmOptions,
) -> RestartOutcome {
    let n = data.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(stream);

    // k-means++ style seeding of the class means
    let mut means = DMatrix::zeros(k, m);
    let first = rng.random_range(0..n);
    means.row_mut(0).copy_from(&data.row(first));
    let mut dist2 = vec![f64::INFINITY; n];
    for center in 1..k {
        for i in 0..n {
            let prev = center - 1;
            let d: f64 = (0..m)
                .map(|j| {
                    let diff = data[(i, j)] - means[(prev, j)];
                    diff * diff
                })
                .sum();
            dist2[i] = dist2[i].min(d);
        }
        let total: f64 = dist2.iter().sum();
        let chosen = if total > 0.0 {
            let mut u: f64 = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, &d) in dist2.iter().enumerate() {
                u -= d;
                if u <= 0.0 {
                    pick = i;
                    break;
                }
            }
            pick
        } else {
            rng.random_range(0..n)
        };
        means.row_mut(center).copy_from(&data.row(chosen));
    }

    let mut weights = vec![1.0 / k as f64; k];
    let mut variances = DMatrix::zeros(k, m);
    for c in 0..k {
        for j in 0..m {
            variances[(c, j)] = pooled[j].max(floors[j]);
        }
    }

    let mut responsibilities = DMatrix::zeros(n, k);
    let mut trace: Vec<f64> = Vec::new();
    let mut converged = false;
    let mut monotone = true;
    let mut floor_streak = 0usize;
    let mut degenerate = false;

    for _iteration in 0..options.max_iter {
        // E step and log-likelihood at the current parameters
        let mut log_likelihood = 0.0;
        for i in 0..n {
            let mut log_terms = vec![0.0; k];
            for c in 0..k {
                let mut acc = weights[c].ln();
                for j in 0..m {
                    let var = variances[(c, j)];
                    let diff = data[(i, j)] - means[(c, j)];
                    acc += -0.5 * (LOG_2PI + var.ln() + diff * diff / var);
                }
                log_terms[c] = acc;
            }
            let max = log_terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let sum_exp: f64 = log_terms.iter().map(|&t| (t - max).exp()).sum();
            let lse = max + sum_exp.ln();
            log_likelihood += lse;
            for c in 0..k {
                responsibilities[(i, c)] = (log_terms[c] - lse).exp();
            }
        }

        if let Some(&prev) = trace.last() {
            if log_likelihood < prev - 1e-8 * (1.0 + prev.abs()) {
                monotone = false;
            }
        }
        let improved = trace
            .last()
            .is_none_or(|&prev| (log_likelihood - prev).abs() >= options.tol);
        trace.push(log_likelihood);

        // M step runs even on the stopping iteration so the returned
        // parameters correspond exactly to the returned responsibilities
        // (the mixing weights are the posterior column means)
        let mut at_floor = false;
        for c in 0..k {
            let nk: f64 = (0..n).map(|i| responsibilities[(i, c)]).sum();
            weights[c] = nk / n as f64;
            if nk < 1.0 {
                degenerate = true;
                break;
            }
            for j in 0..m {
                let mean: f64 = (0..n)
                    .map(|i| responsibilities[(i, c)] * data[(i, j)])
                    .sum::<f64>()
                    / nk;
                means[(c, j)] = mean;
                let var: f64 = (0..n)
                    .map(|i| {
                        let diff = data[(i, j)] - mean;
                        responsibilities[(i, c)] * diff * diff
                    })
                    .sum::<f64>()
                    / nk;
                if var <= floors[j] {
                    at_floor = true;
                    variances[(c, j)] = floors[j];
                } else {
                    variances[(c, j)] = var;
                }
            }
        }
        if degenerate {
            break;
        }
        if at_floor {
            floor_streak += 1;
            if floor_streak > FLOOR_PATIENCE {
                degenerate = true;
                break;
            }
        } else {
            floor_streak = 0;
        }
        if weights.iter().any(|&w| w * (n as f64) < 1.0) {
            degenerate = true;
            break;
        }
        if !improved {
            converged = true;
            break;
        }
    }

    RestartOutcome {
        weights,
        means,
        variances,
        responsibilities,
        trace,
        converged,
        degenerate,
        monotone,
    }
}

/// Reorder classes by descending weight (ties: lexicographically smaller
/// mean vector first) and permute the posterior columns to match.
fn canonicalize(
    model: LatentClassModel,
    responsibilities: DMatrix<f64>,
) -> (LatentClassModel, DMatrix<f64>) {
    let k = model.k;
    let m = model.means.ncols();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        model.weights[b]
            .partial_cmp(&model.weights[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| {
                for j in 0..m {
                    let cmp = model.means[(a, j)]
                        .partial_cmp(&model.means[(b, j)])
                        .unwrap_or(std::cmp::Ordering::Equal);
                    if cmp != std::cmp::Ordering::Equal {
                        return cmp;
                    }
                }
                std::cmp::Ordering::Equal
            })
    });

    let weights = order.iter().map(|&c| model.weights[c]).collect();
    let mut means = DMatrix::zeros(k, m);
    let mut variances = DMatrix::zeros(k, m);
    for (dst, &src) in order.iter().enumerate() {
        means.row_mut(dst).copy_from(&model.means.row(src));
        variances.row_mut(dst).copy_from(&model.variances.row(src));
    }
    let n = responsibilities.nrows();
    let mut post = DMatrix::zeros(n, k);
    for (dst, &src) in order.iter().enumerate() {
        post.set_column(dst, &responsibilities.column(src));
    }
    (
        LatentClassModel {
            k,
            weights,
            means,
            variances,
            fit: model.fit,
        },
        post,
    )
}

/// Serialization mirror for the structured model file.
#[derive(Debug, Serialize, Deserialize)]
struct ModelFile {
    k: usize,
    weights: Vec<f64>,
    means: Vec<Vec<f64>>,
    variances: Vec<Vec<f64>>,
    fit: FitStats,
}

impl LatentClassModel {
    pub fn to_toml_string(&self) -> String {
        let file = ModelFile {
            k: self.k,
            weights: self.weights.clone(),
            means: (0..self.k)
                .map(|c| self.means.row(c).iter().copied().collect())
                .collect(),
            variances: (0..self.k)
                .map(|c| self.variances.row(c).iter().copied().collect())
                .collect(),
            fit: self.fit.clone(),
        };
        toml::to_string_pretty(&file).expect("model serializes")
    }

    pub fn from_toml_str(text: &str) -> Result<Self, LccaError> {
        let file: ModelFile =
            toml::from_str(text).map_err(|e| LccaError::ModelFile(e.to_string()))?;
        let m = file.means.first().map(|r| r.len()).unwrap_or(0);
        Ok(LatentClassModel {
            k: file.k,
            weights: file.weights,
            means: DMatrix::from_fn(file.k, m, |i, j| file.means[i][j]),
            variances: DMatrix::from_fn(file.k, m, |i, j| file.variances[i][j]),
            fit: file.fit,
        })
    }
}
