//! Varimax pre-rotation and promax oblique rotation.

use super::EfaError;
use nalgebra::DMatrix;

#[derive(Debug, Clone)]
pub struct PromaxResult {
    pub pattern: DMatrix<f64>,
    pub factor_correlations: DMatrix<f64>,
    /// Total rotation applied to the unrotated loadings.
    pub rotation: DMatrix<f64>,
}

/// Kaiser-normalized varimax. Returns the rotated loadings and the
/// orthogonal rotation matrix.
pub fn varimax(loadings: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let p = loadings.nrows();
    let m = loadings.ncols();
    if m < 2 {
        return (loadings.clone(), DMatrix::identity(m, m));
    }

    // Kaiser row normalization
    let norms: Vec<f64> = (0..p)
        .map(|i| {
            let ss: f64 = loadings.row(i).iter().map(|x| x * x).sum();
            if ss > 0.0 {
                ss.sqrt()
            } else {
                1.0
            }
        })
        .collect();
    let mut w = loadings.clone();
    for i in 0..p {
        for j in 0..m {
            w[(i, j)] /= norms[i];
        }
    }

    let mut rotation = DMatrix::identity(m, m);
    let mut criterion = 0.0;
    for _ in 0..1000 {
        let rotated = &w * &rotation;
        // gradient target: L^3 - L diag(colsums(L^2)) / p
        let mut target = rotated.clone();
        for j in 0..m {
            let colsum: f64 = rotated.column(j).iter().map(|x| x * x).sum();
            for i in 0..p {
                let l = rotated[(i, j)];
                target[(i, j)] = l * l * l - l * colsum / p as f64;
            }
        }
        let b = w.transpose() * target;
        let svd = b.svd(true, true);
        let u = svd.u.as_ref().expect("svd with u");
        let v_t = svd.v_t.as_ref().expect("svd with v_t");
        rotation = u * v_t;
        let new_criterion: f64 = svd.singular_values.iter().sum();
        if new_criterion < criterion * (1.0 + 1e-12) {
            break;
        }
        criterion = new_criterion;
    }

    let mut rotated = &w * &rotation;
    for i in 0..p {
        for j in 0..m {
            rotated[(i, j)] *= norms[i];
        }
    }
    (rotated, rotation)
}

/// Promax: varimax first, then an oblique Procrustes fit to the
/// element-wise power target `sign(x) |x|^kappa`.
pub fn promax_rotate(loadings: &DMatrix<f64>, kappa: f64) -> Result<PromaxResult, EfaError> {
    let m = loadings.ncols();
    if m < 2 {
        return Ok(PromaxResult {
            pattern: loadings.clone(),
            factor_correlations: DMatrix::identity(m.max(1), m.max(1)),
            rotation: DMatrix::identity(m.max(1), m.max(1)),
        });
    }

    let (x, varimax_rotation) = varimax(loadings);

    let mut target = x.clone();
    for v in target.iter_mut() {
        *v = v.signum() * v.abs().powf(kappa);
    }

    // least-squares transform: U = (X'X)^-1 X'Q
    let xtx = x.transpose() * &x;
    let xtq = x.transpose() * &target;
    let mut u = xtx
        .lu()
        .solve(&xtq)
        .ok_or(EfaError::SingularTargetRegression)?;

    // rescale columns so the implied factor correlations get a unit diagonal
    let utu_inv = (u.transpose() * &u)
        .try_inverse()
        .ok_or(EfaError::SingularTargetRegression)?;
    for j in 0..m {
        let scale = utu_inv[(j, j)].sqrt();
        for i in 0..m {
            u[(i, j)] *= scale;
        }
    }

    let pattern = &x * &u;
    let rotation = varimax_rotation * &u;
    let rotation_inv = rotation
        .clone()
        .try_inverse()
        .ok_or(EfaError::SingularTargetRegression)?;
    let phi = &rotation_inv * rotation_inv.transpose();

    Ok(PromaxResult {
        pattern,
        factor_correlations: phi,
        rotation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn orthogonal_simple_structure_is_a_fixed_point() {
        // exact simple structure: promax must return it unchanged (up to
        // column permutation/sign) with identity factor correlations
        let loadings = DMatrix::from_row_slice(
            6,
            2,
            &[
                0.8, 0.0, 0.7, 0.0, 0.75, 0.0, 0.0, 0.65, 0.0, 0.7, 0.0, 0.72,
            ],
        );
        let result = promax_rotate(&loadings, 4.0).unwrap();
        for j in 0..2 {
            for i in 0..2 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(
                    result.factor_correlations[(i, j)],
                    expected,
                    epsilon = 1e-6
                );
            }
        }
        // pattern equals input up to column order/sign: compare row norms
        for i in 0..6 {
            let in_norm: f64 = loadings.row(i).iter().map(|x| x * x).sum();
            let out_norm: f64 = result.pattern.row(i).iter().map(|x| x * x).sum();
            assert_abs_diff_eq!(in_norm, out_norm, epsilon = 1e-9);
            let max_in = loadings.row(i).iter().fold(0.0f64, |a, &b| a.max(b.abs()));
            let max_out = result
                .pattern
                .row(i)
                .iter()
                .fold(0.0f64, |a, &b| a.max(b.abs()));
            assert_abs_diff_eq!(max_in, max_out, epsilon = 1e-6);
        }
    }

    #[test]
    fn single_factor_rotation_is_identity() {
        let loadings = DMatrix::from_column_slice(4, 1, &[0.8, 0.7, 0.6, 0.5]);
        let result = promax_rotate(&loadings, 4.0).unwrap();
        assert_eq!(result.pattern, loadings);
        assert_eq!(result.factor_correlations, DMatrix::identity(1, 1));
    }

    #[test]
    fn varimax_rotation_is_orthogonal() {
        let loadings = DMatrix::from_row_slice(
            4,
            2,
            &[0.7, 0.3, 0.6, 0.4, 0.2, 0.7, 0.3, 0.8],
        );
        let (_, rotation) = varimax(&loadings);
        let should_be_identity = rotation.transpose() * &rotation;
        for i in 0..2 {
            for j in 0..2 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(should_be_identity[(i, j)], expected, epsilon = 1e-10);
            }
        }
    }
}
