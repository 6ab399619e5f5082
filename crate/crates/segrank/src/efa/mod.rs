//! Exploratory factor analysis: principal-axis extraction, promax rotation,
//! iterative pruning of weak items, and regression factor scores.

mod paf;
mod prune;
mod rotation;
mod scores;

pub use paf::{principal_axis_factoring, suggest_n_factors, PafOptions, PafResult, ScreeSuggestion};
pub use prune::{prune_items, PruneTrace};
pub use rotation::{promax_rotate, varimax, PromaxResult};
pub use scores::{factor_scores, FactorScores};

use crate::linalg::{self, LinalgError};
use crate::psych::{CorrelationMatrix, PsychError};
use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EfaError {
    #[error("cannot extract {m} factors from {p} items")]
    TooManyFactors { m: usize, p: usize },
    #[error("reduced matrix has only {positive} positive eigenvalues, {needed} needed")]
    FewerPositiveEigenvalues { positive: usize, needed: usize },
    #[error("communality iteration did not converge after {iterations} steps (last delta {last_delta:.2e})")]
    NonConvergence { iterations: usize, last_delta: f64 },
    #[error("promax target regression is singular")]
    SingularTargetRegression,
    #[error("scree suggestion needs at least 3 eigenvalues, have {0}")]
    TooFewEigenvalues(usize),
    #[error("pruning would leave factor {factor} with {items_left} item(s); aborting")]
    PruningBreaksFactor { factor: usize, items_left: usize },
    #[error(transparent)]
    Psych(#[from] PsychError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A rotated factor solution.
///
/// Columns are ordered by descending sum of squared pattern loadings and
/// signed so that each column's largest-magnitude loading is positive, which
/// makes repeated fits byte-comparable.
#[derive(Debug, Clone)]
pub struct FactorSolution {
    pub items: Vec<String>,
    /// Pattern loadings (regression weights of items on factors), p x m.
    pub pattern: DMatrix<f64>,
    /// Structure loadings (item-factor correlations), `pattern * phi`.
    pub structure: DMatrix<f64>,
    /// Factor correlation matrix, m x m.
    pub factor_correlations: DMatrix<f64>,
    /// Final communalities, length p.
    pub communalities: Vec<f64>,
    /// Eigenvalues of the final reduced correlation matrix (communalities on
    /// the diagonal), descending, length p.
    pub reduced_eigenvalues: Vec<f64>,
    /// Eigenvalues of the unreduced correlation matrix, descending, length p.
    pub initial_eigenvalues: Vec<f64>,
    /// Sample size behind the correlation matrix.
    pub n: usize,
    /// Communality iterations used by the extraction.
    pub iterations: usize,
    pub warnings: Vec<String>,
}

impl FactorSolution {
    pub fn n_factors(&self) -> usize {
        self.pattern.ncols()
    }

    pub fn n_items(&self) -> usize {
        self.pattern.nrows()
    }
}

/// Share of total variance captured by the extracted factors, from the
/// reduced-matrix spectrum: `100 * sum(top-m reduced eigenvalues) / p`.
pub fn variance_explained(solution: &FactorSolution) -> f64 {
    let m = solution.n_factors();
    let top: f64 = solution.reduced_eigenvalues.iter().take(m).sum();
    100.0 * top / solution.n_items() as f64
}

/// Share of total variance captured by the top-m eigenvalues of the
/// unreduced correlation matrix — the figure conventionally quoted by
/// statistics packages next to a scree plot.
pub fn initial_variance_share(solution: &FactorSolution) -> f64 {
    let m = solution.n_factors();
    let top: f64 = solution.initial_eigenvalues.iter().take(m).sum();
    100.0 * top / solution.n_items() as f64
}

/// Extract `m` factors from a correlation matrix and rotate them:
/// principal-axis factoring followed by promax.
pub fn fit_solution(
    corr: &CorrelationMatrix,
    m: usize,
    paf_options: &PafOptions,
    kappa: f64,
) -> Result<FactorSolution, EfaError> {
    let paf = principal_axis_factoring(corr, m, paf_options)?;
    let rotated = promax_rotate(&paf.loadings, kappa)?;
    let (pattern, phi) = canonicalize(rotated.pattern, rotated.factor_correlations);
    let structure = &pattern * &phi;
    let communalities: Vec<f64> = (&pattern * &phi * pattern.transpose())
        .diagonal()
        .iter()
        .copied()
        .collect();
    let initial_eigenvalues = linalg::eigenvalues_desc(&corr.values);
    Ok(FactorSolution {
        items: corr.items.clone(),
        pattern,
        structure,
        factor_correlations: phi,
        communalities,
        reduced_eigenvalues: paf.eigenvalues,
        initial_eigenvalues,
        n: corr.n,
        iterations: paf.iterations,
        warnings: paf.warnings,
    })
}

/// Deterministic column order and sign convention: factors by descending
/// explained variance (sum of squared pattern loadings), each column signed
/// so its largest-|loading| entry is positive.
fn canonicalize(pattern: DMatrix<f64>, phi: DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let m = pattern.ncols();
    let mut order: Vec<usize> = (0..m).collect();
    let ss: Vec<f64> = (0..m)
        .map(|j| pattern.column(j).iter().map(|x| x * x).sum())
        .collect();
    order.sort_by(|&a, &b| ss[b].partial_cmp(&ss[a]).unwrap_or(std::cmp::Ordering::Equal));

    let mut new_pattern = DMatrix::zeros(pattern.nrows(), m);
    let mut new_phi = DMatrix::zeros(m, m);
    for (dst, &src) in order.iter().enumerate() {
        new_pattern.set_column(dst, &pattern.column(src));
    }
    for (di, &si) in order.iter().enumerate() {
        for (dj, &sj) in order.iter().enumerate() {
            new_phi[(di, dj)] = phi[(si, sj)];
        }
    }
    for j in 0..m {
        let col = new_pattern.column(j);
        let mut max_abs = 0.0;
        let mut max_val = 0.0;
        for &v in col.iter() {
            if v.abs() > max_abs {
                max_abs = v.abs();
                max_val = v;
            }
        }
        if max_val < 0.0 {
            for i in 0..new_pattern.nrows() {
                new_pattern[(i, j)] = -new_pattern[(i, j)];
            }
            for k in 0..m {
                if k != j {
                    new_phi[(j, k)] = -new_phi[(j, k)];
                    new_phi[(k, j)] = -new_phi[(k, j)];
                }
            }
        }
    }
    (new_pattern, new_phi)
}


#[cfg(test)]
mod tests {
    use super::test_support::*;
    use super::*;
    use approx::assert_abs_diff_eq;

    fn opts() -> PafOptions {
        PafOptions {
            tol: 1e-9,
            max_iter: 1000,
        }
    }

    #[test]
    fn variance_explained_perfect_one_factor() {
        let corr = compound(6, 0.64, 500);
        let solution = fit_solution(&corr, 1, &opts(), 4.0).unwrap();
        assert_abs_diff_eq!(variance_explained(&solution), 64.0, epsilon = 0.05);
        for &h2 in &solution.communalities {
            assert_abs_diff_eq!(h2, 0.64, epsilon = 1e-4);
        }
        for v in solution.pattern.column(0).iter() {
            assert_abs_diff_eq!(*v, 0.8, epsilon = 1e-4);
        }
    }

    #[test]
    fn identity_matrix_gives_degenerate_warning() {
        let corr = compound(5, 0.0, 500);
        let solution = fit_solution(&corr, 1, &opts(), 4.0).unwrap();
        assert!(variance_explained(&solution) < 1.0);
        assert!(solution.warnings.iter().any(|w| w.contains("degenerate")));
        for &h2 in &solution.communalities {
            assert!(h2.abs() < 1e-6);
        }
    }

    #[test]
    fn block_structure_recovers_simple_loadings() {
        let corr = two_blocks(3, 0.49, 800);
        let solution = fit_solution(&corr, 2, &opts(), 4.0).unwrap();
        // each item loads 0.7 on its own block and ~0 across after rotation
        for i in 0..6 {
            let own = if i < 3 { 0 } else { 1 };
            let own_col = (0..2)
                .max_by(|&a, &b| {
                    solution.pattern[(i, a)]
                        .abs()
                        .partial_cmp(&solution.pattern[(i, b)].abs())
                        .unwrap()
                })
                .unwrap();
            let _ = own;
            assert_abs_diff_eq!(solution.pattern[(i, own_col)], 0.7, epsilon = 1e-3);
            let cross = solution.pattern[(i, 1 - own_col)];
            assert!(cross.abs() < 1e-3, "cross loading {cross}");
        }
        // orthogonal input: factor correlations stay at identity
        assert_abs_diff_eq!(solution.factor_correlations[(0, 1)], 0.0, epsilon = 1e-6);
    }

    #[test]
    fn rotation_preserves_communalities() {
        let corr = two_blocks(3, 0.49, 800);
        let paf = principal_axis_factoring(&corr, 2, &opts()).unwrap();
        let solution = fit_solution(&corr, 2, &opts(), 4.0).unwrap();
        for (before, after) in paf.communalities.iter().zip(&solution.communalities) {
            assert_abs_diff_eq!(before, after, epsilon = 1e-8);
        }
    }

    #[test]
    fn reduced_spectrum_sums_to_total_communality() {
        let corr = two_blocks(3, 0.49, 800);
        let solution = fit_solution(&corr, 2, &opts(), 4.0).unwrap();
        let spectrum_sum: f64 = solution.reduced_eigenvalues.iter().sum();
        let h2_sum: f64 = solution.communalities.iter().sum();
        assert_abs_diff_eq!(spectrum_sum, h2_sum, epsilon = 1e-8);
    }

    #[test]
    fn too_many_factors_rejected() {
        let corr = compound(4, 0.3, 100);
        assert!(matches!(
            fit_solution(&corr, 4, &opts(), 4.0),
            Err(EfaError::TooManyFactors { m: 4, p: 4 })
        ));
    }
}
