//! Principal-axis factoring and the scree-based factor-count suggestion.

use super::EfaError;
use crate::linalg;
use crate::psych::CorrelationMatrix;
use nalgebra::DMatrix;

/// Communalities are clipped here to keep Heywood cases from running away.
pub const COMMUNALITY_CAP: f64 = 0.9995;

#[derive(Debug, Clone)]
pub struct PafOptions {
    /// Convergence threshold on max |delta communality|.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PafOptions {
    fn default() -> Self {
        // 1e-3 is the conventional stopping point for communality
        // iteration; weak factors can ride a flat ridge below that
        Self {
            tol: 1e-3,
            max_iter: 300,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PafResult {
    /// Unrotated loadings, p x m.
    pub loadings: DMatrix<f64>,
    pub communalities: Vec<f64>,
    /// All p eigenvalues of the final reduced matrix, descending.
    pub eigenvalues: Vec<f64>,
    pub iterations: usize,
    pub warnings: Vec<String>,
}

/// Iterate communalities on the reduced correlation matrix: put h^2 on the
/// diagonal, eigendecompose, scale the top-m eigenvectors by sqrt(eigenvalue),
/// update h^2 from the loading row sums, repeat until max |delta h^2| < tol.
pub fn principal_axis_factoring(
    corr: &CorrelationMatrix,
    m: usize,
    options: &PafOptions,
) -> Result<PafResult, EfaError> {
    let p = corr.p();
    if m == 0 || m >= p {
        return Err(EfaError::TooManyFactors { m, p });
    }

    let mut warnings = Vec::new();
    let mut h2 = initial_communalities(corr, &mut warnings);
    let mut heywood_warned = false;
    let mut last_delta = f64::INFINITY;
    let mut prev_delta = f64::INFINITY;
    let mut stall = 0i32;

    for iteration in 1..=options.max_iter {
        let reduced = reduced_matrix(&corr.values, &h2);
        let near_zero = reduced.iter().all(|v| v.abs() < 1e-8);
        let (values, vectors) = linalg::symmetric_eigen_desc(&reduced);

        if near_zero {
            // no common variance at all (e.g. identity input)
            warnings.push("degenerate solution: no common variance, loadings set to zero".into());
            let eigenvalues: Vec<f64> = values.iter().copied().collect();
            return Ok(PafResult {
                loadings: DMatrix::zeros(p, m),
                communalities: vec![0.0; p],
                eigenvalues,
                iterations: iteration,
                warnings,
            });
        }

        let positive = values.iter().take(m).filter(|&&v| v > 1e-12).count();
        if positive < m {
            return Err(EfaError::FewerPositiveEigenvalues {
                positive,
                needed: m,
            });
        }

        let mut loadings = DMatrix::zeros(p, m);
        for j in 0..m {
            let scale = values[j].sqrt();
            for i in 0..p {
                loadings[(i, j)] = vectors[(i, j)] * scale;
            }
        }
        fix_column_signs(&mut loadings);

        let mut new_h2 = vec![0.0; p];
        let mut clipped = false;
        for i in 0..p {
            let sum: f64 = (0..m).map(|j| loadings[(i, j)] * loadings[(i, j)]).sum();
            new_h2[i] = if sum > COMMUNALITY_CAP {
                clipped = true;
                COMMUNALITY_CAP
            } else {
                sum
            };
        }
        if clipped && !heywood_warned {
            warnings.push(format!(
                "Heywood case: communality clipped at {COMMUNALITY_CAP}"
            ));
            heywood_warned = true;
        }

        let raw_delta = h2
            .iter()
            .zip(&new_h2)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        // the plain fixed-point update can cycle or ride a flat ridge on
        // weak factors; progressively shorten the step while the delta
        // refuses to shrink
        if raw_delta >= prev_delta {
            stall += 1;
        } else {
            stall = 0;
        }
        let step = 0.5f64.powi(stall.min(8));
        for (value, &new) in h2.iter_mut().zip(&new_h2) {
            *value += step * (new - *value);
        }
        last_delta = step * raw_delta;
        prev_delta = raw_delta;

        if last_delta < options.tol {
            let final_reduced = reduced_matrix(&corr.values, &h2);
            let eigenvalues = linalg::eigenvalues_desc(&final_reduced);
            return Ok(PafResult {
                loadings,
                communalities: h2,
                eigenvalues,
                iterations: iteration,
                warnings,
            });
        }
    }

    Err(EfaError::NonConvergence {
        iterations: options.max_iter,
        last_delta,
    })
}

fn reduced_matrix(corr: &DMatrix<f64>, h2: &[f64]) -> DMatrix<f64> {
    let mut reduced = corr.clone();
    for (i, &h) in h2.iter().enumerate() {
        reduced[(i, i)] = h;
    }
    reduced
}

/// Squared multiple correlations (1 - 1/diag(R^-1)); falls back to the
/// largest absolute row correlation when R cannot be inverted.
fn initial_communalities(corr: &CorrelationMatrix, warnings: &mut Vec<String>) -> Vec<f64> {
    let p = corr.p();
    match linalg::invert_symmetric(&corr.values) {
        Ok(inv) => (0..p).map(|i| (1.0 - 1.0 / inv[(i, i)]).clamp(0.0, COMMUNALITY_CAP)).collect(),
        Err(_) => {
            warnings.push(
                "correlation matrix not invertible; starting communalities from max |r|".into(),
            );
            (0..p)
                .map(|i| {
                    (0..p)
                        .filter(|&j| j != i)
                        .map(|j| corr.values[(i, j)].abs())
                        .fold(0.0, f64::max)
                })
                .collect()
        }
    }
}

/// Make the largest-magnitude entry of each column positive (deterministic
/// eigenvector orientation).
fn fix_column_signs(m: &mut DMatrix<f64>) {
    for j in 0..m.ncols() {
        let mut max_abs = 0.0;
        let mut max_val = 0.0;
        for &v in m.column(j).iter() {
            if v.abs() > max_abs {
                max_abs = v.abs();
                max_val = v;
            }
        }
        if max_val < 0.0 {
            for i in 0..m.nrows() {
                m[(i, j)] = -m[(i, j)];
            }
        }
    }
}

/// Scree suggestion with its diagnostics.
#[derive(Debug, Clone)]
pub struct ScreeSuggestion {
    /// Factor count preceding the strongest elbow.
    pub n_factors: usize,
    /// Raised when the eigenvalue decay is near-geometric, i.e. there is no
    /// real elbow and the suggestion is weak.
    pub weak_elbow: bool,
    /// Second differences of the eigenvalue sequence (interior points).
    pub accelerations: Vec<f64>,
}

/// Advisory factor count from the maximum second difference (acceleration)
/// of the descending eigenvalue sequence. Config may always override it.
pub fn suggest_n_factors(eigenvalues: &[f64]) -> Result<ScreeSuggestion, EfaError> {
    let len = eigenvalues.len();
    if len < 3 {
        return Err(EfaError::TooFewEigenvalues(len));
    }
    let accelerations: Vec<f64> = (1..len - 1)
        .map(|i| eigenvalues[i - 1] - 2.0 * eigenvalues[i] + eigenvalues[i + 1])
        .collect();
    let mut best = 0usize;
    for (idx, &a) in accelerations.iter().enumerate() {
        if a > accelerations[best] {
            best = idx;
        }
    }
    // the elbow sits at eigenvalue index best+1 (1-based position best+2);
    // the suggested count is everything before it
    let n_factors = best + 1;

    // near-constant successive ratios mean geometric decay: no elbow
    let mut ratios = Vec::new();
    for w in eigenvalues.windows(2) {
        if w[0] > 1e-9 && w[1] > 1e-9 {
            ratios.push(w[1] / w[0]);
        } else {
            break;
        }
    }
    let weak_elbow = ratios.len() >= 2 && {
        let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
        let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
        max - min < 0.05
    };

    Ok(ScreeSuggestion {
        n_factors,
        weak_elbow,
        accelerations,
    })
}
