//! Small dense linear-algebra helpers shared by the statistical stages.
//!
//! Matrices here are survey-sized (tens of rows), so everything goes through
//! nalgebra's dense routines.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is singular or ill-conditioned (condition estimate {condition:.3e})")]
    Singular { condition: f64 },
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
}

/// Eigendecomposition of a symmetric matrix with eigenvalues sorted in
/// descending order (eigenvectors reordered to match).
pub fn symmetric_eigen_desc(matrix: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let eig = matrix.clone().symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Descending eigenvalues only.
pub fn eigenvalues_desc(matrix: &DMatrix<f64>) -> Vec<f64> {
    let (values, _) = symmetric_eigen_desc(matrix);
    values.iter().copied().collect()
}

/// Condition estimate of a symmetric matrix: |lambda|_max / |lambda|_min.
pub fn condition_estimate(matrix: &DMatrix<f64>) -> f64 {
    let eig = matrix.clone().symmetric_eigen();
    let max = eig.eigenvalues.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let min = eig
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |m, &v| m.min(v.abs()));
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Inverse of a symmetric positive-definite-ish matrix; fails with a
/// condition estimate when the factorization breaks down.
pub fn invert_symmetric(matrix: &DMatrix<f64>) -> Result<DMatrix<f64>, LinalgError> {
    if matrix.nrows() != matrix.ncols() {
        return Err(LinalgError::NotSquare {
            rows: matrix.nrows(),
            cols: matrix.ncols(),
        });
    }
    let condition = condition_estimate(matrix);
    if !condition.is_finite() || condition > 1e12 {
        return Err(LinalgError::Singular { condition });
    }
    matrix
        .clone()
        .try_inverse()
        .ok_or(LinalgError::Singular { condition })
}

/// log-determinant of a symmetric matrix via its spectrum. `None` when any
/// eigenvalue is non-positive (determinant not positive).
pub fn log_det_spd(matrix: &DMatrix<f64>) -> Option<f64> {
    let eig = matrix.clone().symmetric_eigen();
    let mut acc = 0.0;
    for &v in eig.eigenvalues.iter() {
        if v <= 0.0 {
            return None;
        }
        acc += v.ln();
    }
    Some(acc)
}

/// Lower-triangular Cholesky factor; `None` when not positive definite.
pub fn cholesky(matrix: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    nalgebra::Cholesky::new(matrix.clone()).map(|c| c.l())
}
