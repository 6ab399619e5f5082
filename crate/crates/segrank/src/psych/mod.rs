//! Reliability and sampling-adequacy diagnostics: Pearson correlations,
//! Cronbach's alpha, KMO and Bartlett's test of sphericity.

pub mod special;

use crate::linalg::{self, LinalgError};
use crate::survey::{Scale, SurveyDataset, SurveyError};
use nalgebra::DMatrix;
use thiserror::Error;

/// Reliability flag threshold: scales below this alpha are reported as
/// under-reliable.
pub const ALPHA_THRESHOLD: f64 = 0.70;
/// Sampling adequacy flag threshold for the overall KMO.
pub const KMO_THRESHOLD: f64 = 0.60;

#[derive(Debug, Error)]
pub enum PsychError {
    #[error("item {0} has zero variance")]
    ZeroVariance(String),
    #[error("need at least {needed} complete records, have {have}")]
    TooFewRecords { needed: usize, have: usize },
    #[error("correlation matrix of {p} items needs n > p, have n = {n}")]
    SampleTooSmall { n: usize, p: usize },
    #[error("correlation matrix is not invertible: {0}")]
    NotInvertible(#[from] LinalgError),
    #[error("correlation matrix has non-positive determinant")]
    NonPositiveDeterminant,
    #[error("scale {0} needs at least 2 items")]
    ScaleTooSmall(String),
    #[error("total score variance is zero for scale {0}")]
    ZeroTotalVariance(String),
    #[error(transparent)]
    Survey(#[from] SurveyError),
    #[error("{0}")]
    Invalid(String),
}

/// Symmetric item-by-item Pearson correlation matrix with its sample size.
#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    pub items: Vec<String>,
    pub values: DMatrix<f64>,
    pub n: usize,
}

impl CorrelationMatrix {
    /// Validates and canonicalizes: exact symmetry, exact unit diagonal,
    /// entries clamped to [-1, 1] (tolerance 1e-8 before rejection).
    pub fn new(items: Vec<String>, values: DMatrix<f64>, n: usize) -> Result<Self, PsychError> {
        let p = items.len();
        if values.nrows() != p || values.ncols() != p {
            return Err(PsychError::Invalid(format!(
                "matrix is {}x{} but {p} items declared",
                values.nrows(),
                values.ncols()
            )));
        }
        let mut m = values;
        for i in 0..p {
            if (m[(i, i)] - 1.0).abs() > 1e-8 {
                return Err(PsychError::Invalid(format!(
                    "diagonal entry {} is {}, expected 1",
                    items[i],
                    m[(i, i)]
                )));
            }
            m[(i, i)] = 1.0;
            for j in (i + 1)..p {
                let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
                if (m[(i, j)] - m[(j, i)]).abs() > 1e-8 || avg.abs() > 1.0 + 1e-8 {
                    return Err(PsychError::Invalid(format!(
                        "entry ({}, {}) is not a valid correlation",
                        items[i], items[j]
                    )));
                }
                let clamped = avg.clamp(-1.0, 1.0);
                m[(i, j)] = clamped;
                m[(j, i)] = clamped;
            }
        }
        Ok(Self { items, values: m, n })
    }

    pub fn p(&self) -> usize {
        self.items.len()
    }

    /// Sub-matrix restricted to the given items (order preserved).
    pub fn subset(&self, items: &[String]) -> Result<CorrelationMatrix, PsychError> {
        let idx: Vec<usize> = items
            .iter()
            .map(|code| {
                self.items
                    .iter()
                    .position(|c| c == code)
                    .ok_or_else(|| PsychError::Invalid(format!("item {code} not in matrix")))
            })
            .collect::<Result<_, _>>()?;
        let vals = DMatrix::from_fn(idx.len(), idx.len(), |i, j| self.values[(idx[i], idx[j])]);
        Ok(CorrelationMatrix {
            items: items.to_vec(),
            values: vals,
            n: self.n,
        })
    }
}

/// Product-moment correlations over complete records for the given items.
pub fn pearson_correlation_matrix(
    ds: &SurveyDataset,
    items: &[String],
) -> Result<CorrelationMatrix, PsychError> {
    let columns: Vec<Vec<f64>> = items
        .iter()
        .map(|code| ds.item_values(code).map_err(PsychError::from))
        .collect::<Result<_, _>>()?;
    let names: Vec<String> = items.to_vec();
    correlation_from_columns(&names, &columns, ds.len())
}

/// Correlation matrix from raw numeric columns (shared by dataset wrapper
/// and tests).
pub fn correlation_from_columns(
    items: &[String],
    columns: &[Vec<f64>],
    n: usize,
) -> Result<CorrelationMatrix, PsychError> {
    if n < 3 {
        return Err(PsychError::TooFewRecords { needed: 3, have: n });
    }
    let p = columns.len();
    let means: Vec<f64> = columns.iter().map(|c| c.iter().sum::<f64>() / n as f64).collect();
    let mut centered: Vec<Vec<f64>> = Vec::with_capacity(p);
    let mut norms = Vec::with_capacity(p);
    for (col, &mean) in columns.iter().zip(&means) {
        let c: Vec<f64> = col.iter().map(|&x| x - mean).collect();
        let ss: f64 = c.iter().map(|&x| x * x).sum();
        if ss <= 0.0 {
            let idx = centered.len();
            return Err(PsychError::ZeroVariance(items[idx].clone()));
        }
        norms.push(ss.sqrt());
        centered.push(c);
    }
    let mut m = DMatrix::identity(p, p);
    for i in 0..p {
        for j in (i + 1)..p {
            let dot: f64 = centered[i].iter().zip(&centered[j]).map(|(a, b)| a * b).sum();
            let r = (dot / (norms[i] * norms[j])).clamp(-1.0, 1.0);
            m[(i, j)] = r;
            m[(j, i)] = r;
        }
    }
    CorrelationMatrix::new(items.to_vec(), m, n)
}

/// Internal-consistency reliability of one scale.
#[derive(Debug, Clone)]
pub struct AlphaReport {
    pub scale_id: String,
    /// Covariance-based (raw) alpha — the primary figure.
    pub raw: f64,
    /// Correlation-based (standardized) alpha, reported alongside.
    pub standardized: f64,
    pub items: usize,
    /// Raised when raw alpha falls below [`ALPHA_THRESHOLD`].
    pub below_threshold: bool,
}

/// Cronbach's alpha for a scale of the dataset.
pub fn cronbach_alpha(ds: &SurveyDataset, scale: &Scale) -> Result<AlphaReport, PsychError> {
    let columns: Vec<Vec<f64>> = scale
        .items
        .iter()
        .map(|code| ds.item_values(code).map_err(PsychError::from))
        .collect::<Result<_, _>>()?;
    cronbach_alpha_from_columns(&scale.id, &columns)
}

/// Alpha from raw numeric columns: `k/(k-1) * (1 - sum(var_i) / var_total)`.
pub fn cronbach_alpha_from_columns(
    scale_id: &str,
    columns: &[Vec<f64>],
) -> Result<AlphaReport, PsychError> {
    let k = columns.len();
    if k < 2 {
        return Err(PsychError::ScaleTooSmall(scale_id.to_string()));
    }
    let n = columns[0].len();
    if n < 2 {
        return Err(PsychError::TooFewRecords { needed: 2, have: n });
    }
    let variance = |col: &[f64]| {
        let mean = col.iter().sum::<f64>() / col.len() as f64;
        col.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / (col.len() as f64 - 1.0)
    };
    let item_var_sum: f64 = columns.iter().map(|c| variance(c)).sum();
    let totals: Vec<f64> = (0..n).map(|i| columns.iter().map(|c| c[i]).sum()).collect();
    let total_var = variance(&totals);
    if total_var <= 0.0 {
        return Err(PsychError::ZeroTotalVariance(scale_id.to_string()));
    }
    let kf = k as f64;
    let raw = kf / (kf - 1.0) * (1.0 - item_var_sum / total_var);

    // standardized alpha from the mean inter-item correlation
    let names: Vec<String> = (0..k).map(|i| format!("c{i}")).collect();
    let corr = correlation_from_columns(&names, columns, n)?;
    let mut sum_r = 0.0;
    for i in 0..k {
        for j in (i + 1)..k {
            sum_r += corr.values[(i, j)];
        }
    }
    let mean_r = sum_r / (kf * (kf - 1.0) / 2.0);
    let standardized = kf * mean_r / (1.0 + (kf - 1.0) * mean_r);

    Ok(AlphaReport {
        scale_id: scale_id.to_string(),
        raw,
        standardized,
        items: k,
        below_threshold: raw < ALPHA_THRESHOLD,
    })
}

/// Kaiser-Meyer-Olkin sampling adequacy.
#[derive(Debug, Clone)]
pub struct KmoReport {
    pub overall: f64,
    /// Per-item measure of sampling adequacy, in item order.
    pub msa: Vec<(String, f64)>,
    /// False when overall KMO falls below [`KMO_THRESHOLD`].
    pub adequate: bool,
}

/// KMO from squared correlations vs squared partial correlations (off the
/// inverse correlation matrix). Singular matrices are an error; pass a
/// ridge to stabilize explicitly.
pub fn kmo(corr: &CorrelationMatrix) -> Result<KmoReport, PsychError> {
    kmo_with_ridge(corr, None)
}

pub fn kmo_with_ridge(
    corr: &CorrelationMatrix,
    ridge: Option<f64>,
) -> Result<KmoReport, PsychError> {
    let p = corr.p();
    let mut m = corr.values.clone();
    if let Some(eps) = ridge {
        for i in 0..p {
            m[(i, i)] += eps;
        }
    }
    let inv = linalg::invert_symmetric(&m)?;
    let mut r2 = DMatrix::zeros(p, p);
    let mut q2 = DMatrix::zeros(p, p);
    for i in 0..p {
        for j in 0..p {
            if i == j {
                continue;
            }
            let q = -inv[(i, j)] / (inv[(i, i)] * inv[(j, j)]).sqrt();
            r2[(i, j)] = corr.values[(i, j)] * corr.values[(i, j)];
            q2[(i, j)] = q * q;
        }
    }
    let sum_r2: f64 = r2.iter().sum();
    let sum_q2: f64 = q2.iter().sum();
    let overall = sum_r2 / (sum_r2 + sum_q2);
    let msa = corr
        .items
        .iter()
        .enumerate()
        .map(|(i, code)| {
            let row_r2: f64 = (0..p).filter(|&j| j != i).map(|j| r2[(i, j)]).sum();
            let row_q2: f64 = (0..p).filter(|&j| j != i).map(|j| q2[(i, j)]).sum();
            (code.clone(), row_r2 / (row_r2 + row_q2))
        })
        .collect();
    Ok(KmoReport {
        overall,
        msa,
        adequate: overall >= KMO_THRESHOLD,
    })
}

/// Bartlett's test that the correlation matrix differs from identity.
#[derive(Debug, Clone)]
pub struct BartlettReport {
    pub chi2: f64,
    pub df: u64,
    pub p_value: f64,
}

/// chi2 = -(n - 1 - (2p+5)/6) ln|R|, df = p(p-1)/2.
pub fn bartlett_sphericity(corr: &CorrelationMatrix) -> Result<BartlettReport, PsychError> {
    let p = corr.p();
    let n = corr.n;
    if n <= p {
        return Err(PsychError::SampleTooSmall { n, p });
    }
    let log_det = linalg::log_det_spd(&corr.values).ok_or(PsychError::NonPositiveDeterminant)?;
    let factor = n as f64 - 1.0 - (2.0 * p as f64 + 5.0) / 6.0;
    let chi2 = (-factor * log_det).max(0.0);
    let df = (p * (p - 1) / 2) as u64;
    let p_value = special::chi_square_sf(chi2, df);
    Ok(BartlettReport { chi2, df, p_value })
}

/// Combined adequacy diagnostics gating the factor analysis.
#[derive(Debug, Clone)]
pub struct AdequacyReport {
    pub kmo: KmoReport,
    pub bartlett: BartlettReport,
}

pub fn adequacy_report(corr: &CorrelationMatrix) -> Result<AdequacyReport, PsychError> {
    Ok(AdequacyReport {
        kmo: kmo(corr)?,
        bartlett: bartlett_sphericity(corr)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn names(k: usize) -> Vec<String> {
        (0..k).map(|i| format!("v{i}")).collect()
    }

    #[test]
    fn correlation_reference_cases() {
        let cols = vec![vec![1.0, 2.0, 3.0], vec![3.0, 2.0, 1.0]];
        let corr = correlation_from_columns(&names(2), &cols, 3).unwrap();
        assert_abs_diff_eq!(corr.values[(0, 0)], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(corr.values[(0, 1)], -1.0, epsilon = 1e-12);

        let cols = vec![vec![1.0, 2.0, 3.0, 4.0], vec![1.0, 3.0, 2.0, 4.0]];
        let corr = correlation_from_columns(&names(2), &cols, 4).unwrap();
        assert_abs_diff_eq!(corr.values[(0, 1)], 0.8, epsilon = 1e-12);
    }

    #[test]
    fn zero_variance_item_is_named() {
        let cols = vec![vec![1.0, 2.0, 3.0], vec![5.0, 5.0, 5.0]];
        match correlation_from_columns(&names(2), &cols, 3) {
            Err(PsychError::ZeroVariance(code)) => assert_eq!(code, "v1"),
            other => panic!("expected zero-variance error, got {other:?}"),
        }
    }

    #[test]
    fn alpha_identical_items_is_one() {
        let col = vec![3.0, 1.0, 2.0, 3.0, 1.0, 2.0, 3.0, 1.0];
        let report = cronbach_alpha_from_columns("s", &[col.clone(), col]).unwrap();
        assert_abs_diff_eq!(report.raw, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn alpha_uncorrelated_equal_variance_items_is_zero() {
        // two orthogonal contrast columns: equal variance, zero correlation
        let a = vec![1.0, 1.0, -1.0, -1.0];
        let b = vec![1.0, -1.0, 1.0, -1.0];
        let report = cronbach_alpha_from_columns("s", &[a, b]).unwrap();
        assert_abs_diff_eq!(report.raw, 0.0, epsilon = 1e-12);
        assert!(report.below_threshold);
    }

    #[test]
    fn alpha_three_items_pairwise_half_correlated() {
        // Hadamard construction: x_i = u0 + u_i with orthogonal equal-norm
        // columns gives exact pairwise correlation 1/2 and equal variances,
        // where the standardized identity k r / (1 + (k-1) r) gives 0.75.
        let u0 = [1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0];
        let u1 = [1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0];
        let u2 = [1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0];
        let u3 = [1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0, 1.0];
        let mk = |u: &[f64; 8]| -> Vec<f64> {
            u0.iter().zip(u).map(|(a, b)| (a + b + 4.0) / 2.0).collect()
        };
        let cols = vec![mk(&u1), mk(&u2), mk(&u3)];
        let report = cronbach_alpha_from_columns("s", &cols).unwrap();
        assert_abs_diff_eq!(report.raw, 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(report.standardized, 0.75, epsilon = 1e-12);
    }

    #[test]
    fn alpha_invariant_under_shift_and_common_scale() {
        let base = vec![
            vec![1.0, 4.0, 2.0, 6.0, 3.0],
            vec![2.0, 5.0, 1.0, 7.0, 4.0],
            vec![1.0, 5.0, 3.0, 6.0, 2.0],
        ];
        let reference = cronbach_alpha_from_columns("s", &base).unwrap().raw;
        let shifted: Vec<Vec<f64>> = base
            .iter()
            .enumerate()
            .map(|(i, c)| c.iter().map(|&x| x + (i as f64 + 1.0) * 10.0).collect())
            .collect();
        let scaled: Vec<Vec<f64>> = base
            .iter()
            .map(|c| c.iter().map(|&x| x * 2.5).collect())
            .collect();
        assert_abs_diff_eq!(
            cronbach_alpha_from_columns("s", &shifted).unwrap().raw,
            reference,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            cronbach_alpha_from_columns("s", &scaled).unwrap().raw,
            reference,
            epsilon = 1e-12
        );
    }

    fn compound_symmetry(p: usize, r: f64, n: usize) -> CorrelationMatrix {
        let m = DMatrix::from_fn(p, p, |i, j| if i == j { 1.0 } else { r });
        CorrelationMatrix::new(names(p), m, n).unwrap()
    }

    #[test]
    fn kmo_two_items_is_exactly_half() {
        // with two variables the partial correlation equals r, so
        // r^2 / (r^2 + q^2) = 1/2 for any nonzero r
        let report = kmo(&compound_symmetry(2, 0.5, 100)).unwrap();
        assert_abs_diff_eq!(report.overall, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn kmo_near_identity_flagged_inadequate() {
        let report = kmo(&compound_symmetry(4, 1e-6, 100)).unwrap();
        assert_abs_diff_eq!(report.overall, 0.5, epsilon = 1e-3);
        assert!(!report.adequate);
    }

    #[test]
    fn kmo_compound_symmetry_matches_closed_form_oracle() {
        // closed-form inverse of (1-r)I + rJ gives the partial correlation
        // q = (r / (1 + (p-1) r)) / (1 - r + r/(1+(p-1)r)) ... computed here
        // directly from the analytic inverse.
        let (p, r) = (6usize, 0.6);
        let coef = 1.0 / (1.0 - r);
        let shrink = r / (1.0 + (p as f64 - 1.0) * r);
        let inv_diag = coef * (1.0 - shrink);
        let inv_off = -coef * shrink;
        let q = -inv_off / inv_diag;
        let expected = (r * r) / (r * r + q * q);
        let report = kmo(&compound_symmetry(p, r, 200)).unwrap();
        assert_abs_diff_eq!(report.overall, expected, epsilon = 1e-12);
        assert!(report.overall > 0.7);
        for (_, msa) in &report.msa {
            assert_abs_diff_eq!(*msa, expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn kmo_singular_matrix_errors_with_condition() {
        let m = DMatrix::from_element(3, 3, 1.0);
        let corr = CorrelationMatrix { items: names(3), values: m, n: 50 };
        match kmo(&corr) {
            Err(PsychError::NotInvertible(LinalgError::Singular { condition })) => {
                assert!(condition > 1e12)
            }
            other => panic!("expected singular error, got {other:?}"),
        }
        // the ridge escape hatch makes it computable
        assert!(kmo_with_ridge(&corr, Some(1e-3)).is_ok());
    }

    #[test]
    fn bartlett_identity_matrix() {
        let report = bartlett_sphericity(&compound_symmetry(5, 0.0, 100)).unwrap();
        assert_eq!(report.df, 10);
        assert_abs_diff_eq!(report.chi2, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(report.p_value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn bartlett_two_by_two_reference() {
        let report = bartlett_sphericity(&compound_symmetry(2, 0.5, 101)).unwrap();
        // -(101 - 1 - 9/6) ln(1 - 0.25) = -98.5 ln 0.75
        assert_abs_diff_eq!(report.chi2, -98.5 * 0.75f64.ln(), epsilon = 1e-10);
        assert!((report.chi2 - 28.34).abs() < 0.005);
        assert_eq!(report.df, 1);
    }

    #[test]
    fn bartlett_requires_n_above_p() {
        let corr = compound_symmetry(5, 0.3, 5);
        assert!(matches!(
            bartlett_sphericity(&corr),
            Err(PsychError::SampleTooSmall { n: 5, p: 5 })
        ));
    }

    #[test]
    fn ranges_hold_on_random_matrices() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let p = rng.random_range(3..8);
            let n = rng.random_range((p + 2)..60);
            let cols: Vec<Vec<f64>> = (0..p)
                .map(|_| (0..n).map(|_| rng.random_range(1..=7) as f64).collect())
                .collect();
            let Ok(corr) = correlation_from_columns(&names(p), &cols, n) else {
                continue;
            };
            if let Ok(report) = kmo(&corr) {
                assert!((0.0..=1.0).contains(&report.overall));
                for (_, msa) in report.msa {
                    assert!((0.0..=1.0).contains(&msa));
                }
            }
            if let Ok(report) = bartlett_sphericity(&corr) {
                assert!(report.chi2 >= 0.0);
                assert!((0.0..=1.0).contains(&report.p_value));
            }
        }
    }
}
