//! Synthetic Likert survey generator.
//!
//! Draws a latent class per respondent, a factor vector from the class
//! Gaussian, item latents through a loading matrix with noise topped up to
//! unit total variance, and discretizes to the 1..=7 scale by per-item
//! thresholds. Attribute batteries and passive covariates are generated from
//! class-keyed rules. Everything is deterministic given the seed.

use crate::linalg;
use crate::survey::{
    CovariateValue, LikertValue, SurveyDataset, SurveyError, SurveyRecord, SurveySchema,
};
use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeneratorError {
    #[error("class shares must be positive and sum to 1 (sum = {0})")]
    BadShares(f64),
    #[error("thresholds for {0} are not strictly increasing")]
    BadThresholds(String),
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("factor correlation matrix is not positive definite")]
    BadFactorCorrelation,
    #[error("item {item}: communal variance {h2:.4} reaches or exceeds 1")]
    ExcessiveCommunality { item: String, h2: f64 },
    #[error("covariate rule {0}: class probabilities must sum to 1")]
    BadCovariateProbs(String),
    #[error(transparent)]
    Survey(#[from] SurveyError),
}

/// One latent class: mixing share plus factor means/variances.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassSpec {
    pub share: f64,
    pub factor_means: Vec<f64>,
    pub factor_variances: Vec<f64>,
}

/// Class-keyed generation rule for an attribute-importance item.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AttributeRule {
    pub code: String,
    /// Latent mean per class.
    pub class_means: Vec<f64>,
    pub sd: f64,
    pub thresholds: [f64; 6],
}

/// Class-keyed generation rule for a passive covariate.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CovariateRule {
    Categorical {
        code: String,
        levels: Vec<String>,
        /// One probability row per class, aligned with `levels`.
        class_probs: Vec<Vec<f64>>,
    },
    Continuous {
        code: String,
        class_mean: Vec<f64>,
        class_sd: Vec<f64>,
    },
}

impl CovariateRule {
    pub fn code(&self) -> &str {
        match self {
            CovariateRule::Categorical { code, .. } => code,
            CovariateRule::Continuous { code, .. } => code,
        }
    }
}

/// Complete generator setup for one synthetic survey.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub n: usize,
    pub seed: u64,
    pub item_codes: Vec<String>,
    /// True pattern loadings, one row (length m) per item.
    pub loadings: Vec<Vec<f64>>,
    /// Factor correlation matrix (m x m).
    pub factor_correlations: Vec<Vec<f64>>,
    pub classes: Vec<ClassSpec>,
    /// Strictly increasing cut points per item, mapping the latent scale to
    /// levels 1..=7.
    pub item_thresholds: Vec<[f64; 6]>,
    #[serde(default)]
    pub attributes: Vec<AttributeRule>,
    #[serde(default)]
    pub covariates: Vec<CovariateRule>,
}

/// What the generator actually drew, for oracle-style verification.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    /// Zero-based class label per respondent.
    pub class_labels: Vec<usize>,
    /// n x m factor draws.
    pub factor_scores: DMatrix<f64>,
}

impl GeneratorConfig {
    pub fn n_factors(&self) -> usize {
        self.factor_correlations.len()
    }

    pub fn validate(&self) -> Result<(), GeneratorError> {
        let m = self.n_factors();
        let p = self.item_codes.len();
        if self.loadings.len() != p {
            return Err(GeneratorError::Shape(format!(
                "{} loading rows for {p} items",
                self.loadings.len()
            )));
        }
        for (code, row) in self.item_codes.iter().zip(&self.loadings) {
            if row.len() != m {
                return Err(GeneratorError::Shape(format!(
                    "loading row for {code} has {} entries, expected {m}",
                    row.len()
                )));
            }
        }
        if self.item_thresholds.len() != p {
            return Err(GeneratorError::Shape(format!(
                "{} threshold rows for {p} items",
                self.item_thresholds.len()
            )));
        }
        for (code, t) in self.item_codes.iter().zip(&self.item_thresholds) {
            if t.windows(2).any(|w| w[0] >= w[1]) {
                return Err(GeneratorError::BadThresholds(code.clone()));
            }
        }
        let share_sum: f64 = self.classes.iter().map(|c| c.share).sum();
        if self.classes.is_empty()
            || self.classes.iter().any(|c| c.share <= 0.0)
            || (share_sum - 1.0).abs() > 1e-9
        {
            return Err(GeneratorError::BadShares(share_sum));
        }
        for class in &self.classes {
            if class.factor_means.len() != m || class.factor_variances.len() != m {
                return Err(GeneratorError::Shape(
                    "class mean/variance length != factor count".into(),
                ));
            }
            if class.factor_variances.iter().any(|&v| v <= 0.0) {
                return Err(GeneratorError::Shape("non-positive class variance".into()));
            }
        }
        for rule in &self.attributes {
            if rule.class_means.len() != self.classes.len() {
                return Err(GeneratorError::Shape(format!(
                    "attribute {} has {} class means for {} classes",
                    rule.code,
                    rule.class_means.len(),
                    self.classes.len()
                )));
            }
            if rule.thresholds.windows(2).any(|w| w[0] >= w[1]) {
                return Err(GeneratorError::BadThresholds(rule.code.clone()));
            }
        }
        for rule in &self.covariates {
            match rule {
                CovariateRule::Categorical { code, levels, class_probs } => {
                    if class_probs.len() != self.classes.len() {
                        return Err(GeneratorError::Shape(format!(
                            "covariate {code} probability rows != class count"
                        )));
                    }
                    for row in class_probs {
                        if row.len() != levels.len()
                            || (row.iter().sum::<f64>() - 1.0).abs() > 1e-9
                            || row.iter().any(|&x| x < 0.0)
                        {
                            return Err(GeneratorError::BadCovariateProbs(code.clone()));
                        }
                    }
                }
                CovariateRule::Continuous { code, class_mean, class_sd } => {
                    if class_mean.len() != self.classes.len()
                        || class_sd.len() != self.classes.len()
                        || class_sd.iter().any(|&s| s <= 0.0)
                    {
                        return Err(GeneratorError::Shape(format!(
                            "covariate {code} mean/sd rows != class count"
                        )));
                    }
                }
            }
        }
        // factor correlation must factor, and unique variances must stay positive
        self.mixture_noise_sd()?;
        Ok(())
    }

    fn phi(&self) -> DMatrix<f64> {
        let m = self.n_factors();
        DMatrix::from_fn(m, m, |i, j| self.factor_correlations[i][j])
    }

    fn loading_matrix(&self) -> DMatrix<f64> {
        let m = self.n_factors();
        DMatrix::from_fn(self.item_codes.len(), m, |i, j| self.loadings[i][j])
    }

    /// Factor covariance of the class mixture.
    fn mixture_covariance(&self) -> DMatrix<f64> {
        let m = self.n_factors();
        let phi = self.phi();
        let mut mean = DVector::zeros(m);
        for class in &self.classes {
            mean += class.share * DVector::from_column_slice(&class.factor_means);
        }
        let mut cov = DMatrix::zeros(m, m);
        for class in &self.classes {
            let mu = DVector::from_column_slice(&class.factor_means);
            let sd = DVector::from_iterator(m, class.factor_variances.iter().map(|v| v.sqrt()));
            let d = DMatrix::from_diagonal(&sd);
            let class_cov = &d * &phi * &d;
            cov += class.share * (class_cov + &mu * mu.transpose());
        }
        cov -= &mean * mean.transpose();
        cov
    }

    /// Unique-noise standard deviation per item so that each item latent has
    /// unit total variance under the mixture.
    fn mixture_noise_sd(&self) -> Result<Vec<f64>, GeneratorError> {
        if linalg::cholesky(&self.phi()).is_none() {
            return Err(GeneratorError::BadFactorCorrelation);
        }
        let cov = self.mixture_covariance();
        let lambda = self.loading_matrix();
        let mut out = Vec::with_capacity(self.item_codes.len());
        for (idx, code) in self.item_codes.iter().enumerate() {
            let row = lambda.row(idx).transpose();
            let h2 = (row.transpose() * &cov * &row)[(0, 0)];
            let psi2 = 1.0 - h2;
            if psi2 < -1e-9 {
                return Err(GeneratorError::ExcessiveCommunality {
                    item: code.clone(),
                    h2,
                });
            }
            out.push(psi2.max(0.0).sqrt());
        }
        Ok(out)
    }
}

fn discretize(y: f64, thresholds: &[f64; 6]) -> LikertValue {
    let mut level = 1u8;
    for &t in thresholds {
        if y >= t {
            level += 1;
        }
    }
    LikertValue::new(level).expect("level stays within 1..=7")
}

/// Draw a synthetic survey conforming to `schema`.
pub fn simulate_survey(
    gen: &GeneratorConfig,
    schema: &SurveySchema,
) -> Result<SurveyDataset, GeneratorError> {
    simulate_survey_with_truth(gen, schema).map(|(ds, _)| ds)
}

/// Same as [`simulate_survey`] but also returns the generating classes and
/// factor draws for verification.
pub fn simulate_survey_with_truth(
    gen: &GeneratorConfig,
    schema: &SurveySchema,
) -> Result<(SurveyDataset, GroundTruth), GeneratorError> {
    gen.validate()?;
    for code in &gen.item_codes {
        if !schema.has_item(code) {
            return Err(GeneratorError::Shape(format!(
                "generator item {code} missing from schema"
            )));
        }
    }
    let m = gen.n_factors();
    let phi_chol = linalg::cholesky(&gen.phi()).ok_or(GeneratorError::BadFactorCorrelation)?;
    let lambda = gen.loading_matrix();
    let noise_sd = gen.mixture_noise_sd()?;
    let cum_shares: Vec<f64> = gen
        .classes
        .iter()
        .scan(0.0, |acc, c| {
            *acc += c.share;
            Some(*acc)
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(gen.seed);
    let mut records = Vec::with_capacity(gen.n);
    let mut labels = Vec::with_capacity(gen.n);
    let mut scores = DMatrix::zeros(gen.n, m);

    for idx in 0..gen.n {
        let u: f64 = rng.random();
        let class = cum_shares.iter().position(|&c| u < c).unwrap_or(gen.classes.len() - 1);
        let spec = &gen.classes[class];

        let z = DVector::from_iterator(m, (0..m).map(|_| rng.sample::<f64, _>(StandardNormal)));
        let mut f = &phi_chol * z;
        for j in 0..m {
            f[j] = spec.factor_means[j] + spec.factor_variances[j].sqrt() * f[j];
        }
        scores.row_mut(idx).copy_from(&f.transpose());
        labels.push(class);

        let mut responses = BTreeMap::new();
        for (i, code) in gen.item_codes.iter().enumerate() {
            let eps: f64 = rng.sample(StandardNormal);
            let y = (lambda.row(i) * &f)[(0, 0)] + noise_sd[i] * eps;
            responses.insert(code.clone(), Some(discretize(y, &gen.item_thresholds[i])));
        }
        for rule in &gen.attributes {
            let eps: f64 = rng.sample(StandardNormal);
            let y = rule.class_means[class] + rule.sd * eps;
            responses.insert(rule.code.clone(), Some(discretize(y, &rule.thresholds)));
        }

        let mut covariates = BTreeMap::new();
        for rule in &gen.covariates {
            match rule {
                CovariateRule::Categorical { code, levels, class_probs } => {
                    let u: f64 = rng.random();
                    let probs = &class_probs[class];
                    let mut acc = 0.0;
                    let mut chosen = levels.len() - 1;
                    for (li, &p) in probs.iter().enumerate() {
                        acc += p;
                        if u < acc {
                            chosen = li;
                            break;
                        }
                    }
                    covariates.insert(
                        code.clone(),
                        Some(CovariateValue::Categorical(levels[chosen].clone())),
                    );
                }
                CovariateRule::Continuous { code, class_mean, class_sd } => {
                    let eps: f64 = rng.sample(StandardNormal);
                    covariates.insert(
                        code.clone(),
                        Some(CovariateValue::Continuous(
                            class_mean[class] + class_sd[class] * eps,
                        )),
                    );
                }
            }
        }

        records.push(SurveyRecord {
            respondent_id: format!("r{}", idx + 1),
            responses,
            covariates,
        });
    }

    let ds = SurveyDataset {
        schema: schema.clone(),
        records,
        provenance: format!("synthetic:seed={}", gen.seed),
    };
    Ok((ds, GroundTruth { class_labels: labels, factor_scores: scores }))
}

/// Cut points that reproduce a target level distribution (in percent) for a
/// standard-normal latent item.
pub fn thresholds_from_shares(shares: &[f64; 7]) -> [f64; 6] {
    let normal = Normal::standard();
    let mut out = [0.0; 6];
    let mut cum = 0.0;
    for (k, out_k) in out.iter_mut().enumerate() {
        cum += shares[k] / 100.0;
        *out_k = normal.inverse_cdf(cum.clamp(1e-9, 1.0 - 1e-9));
    }
    out
}

/// Equal-probability cut points for a standard-normal latent item.
pub fn equiprobable_thresholds() -> [f64; 6] {
    let normal = Normal::standard();
    let mut out = [0.0; 6];
    for (k, out_k) in out.iter_mut().enumerate() {
        *out_k = normal.inverse_cdf((k as f64 + 1.0) / 7.0);
    }
    out
}

/// Linear attenuation factor of a Pearson correlation when a unit-variance
/// normal latent is discretized at the given thresholds: `sum(phi(tau)) /
/// sd(discrete)`. Used to pre-compensate calibration loadings.
pub fn attenuation_factor(thresholds: &[f64; 6]) -> f64 {
    let normal = Normal::standard();
    let density_sum: f64 = thresholds
        .iter()
        .map(|&t| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt())
        .sum();
    let mut probs = [0.0; 7];
    let mut prev = 0.0;
    for (k, p) in probs.iter_mut().enumerate() {
        let cdf = if k < 6 { normal.cdf(thresholds[k]) } else { 1.0 };
        *p = cdf - prev;
        prev = cdf;
    }
    let mean: f64 = probs.iter().enumerate().map(|(k, p)| (k as f64 + 1.0) * p).sum();
    let var: f64 = probs
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let d = k as f64 + 1.0 - mean;
            d * d * p
        })
        .sum();
    density_sum / var.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::survey::{IndicatorItem, Scale};
    use approx::assert_abs_diff_eq;

    fn one_factor_schema() -> SurveySchema {
        let items: Vec<IndicatorItem> = (1..=3)
            .map(|i| IndicatorItem {
                code: format!("I{i}"),
                prompt: String::new(),
                scale: "s".into(),
            })
            .collect();
        SurveySchema::new(
            "sim",
            items,
            vec![Scale {
                id: "s".into(),
                name: String::new(),
                items: vec!["I1".into(), "I2".into(), "I3".into()],
                attribute_set: false,
            }],
            vec![],
            vec![],
        )
        .unwrap()
    }

    fn one_factor_config(n: usize, seed: u64, loading: f64) -> GeneratorConfig {
        GeneratorConfig {
            n,
            seed,
            item_codes: vec!["I1".into(), "I2".into(), "I3".into()],
            loadings: vec![vec![loading]; 3],
            factor_correlations: vec![vec![1.0]],
            classes: vec![ClassSpec {
                share: 1.0,
                factor_means: vec![0.0],
                factor_variances: vec![1.0],
            }],
            item_thresholds: vec![equiprobable_thresholds(); 3],
            attributes: vec![],
            covariates: vec![],
        }
    }

    #[test]
    fn zero_noise_items_are_monotone_in_the_factor() {
        let cfg = one_factor_config(500, 3, 1.0); // unit loading => zero noise
        let (ds, truth) = simulate_survey_with_truth(&cfg, &one_factor_schema()).unwrap();
        let values: Vec<u8> = ds.records.iter().map(|r| r.response("I1").unwrap().get()).collect();
        for a in 0..values.len() {
            for b in 0..values.len() {
                if truth.factor_scores[(a, 0)] < truth.factor_scores[(b, 0)] {
                    assert!(values[a] <= values[b]);
                }
            }
        }
    }

    #[test]
    fn same_seed_reproduces_identical_data() {
        let cfg = one_factor_config(200, 9, 0.8);
        let schema = one_factor_schema();
        let (a, _) = simulate_survey_with_truth(&cfg, &schema).unwrap();
        let (b, _) = simulate_survey_with_truth(&cfg, &schema).unwrap();
        for (ra, rb) in a.records.iter().zip(&b.records) {
            assert_eq!(ra.responses, rb.responses);
        }
    }

    #[test]
    fn class_shares_are_recovered_at_scale() {
        let mut cfg = one_factor_config(10_000, 11, 0.8);
        cfg.classes = vec![
            ClassSpec { share: 0.48, factor_means: vec![-0.5], factor_variances: vec![0.5] },
            ClassSpec { share: 0.28, factor_means: vec![0.3], factor_variances: vec![0.5] },
            ClassSpec { share: 0.24, factor_means: vec![0.65], factor_variances: vec![0.5] },
        ];
        let (_, truth) = simulate_survey_with_truth(&cfg, &one_factor_schema()).unwrap();
        let mut counts = [0usize; 3];
        for &c in &truth.class_labels {
            counts[c] += 1;
        }
        for (count, share) in counts.iter().zip([0.48, 0.28, 0.24]) {
            let empirical = 100.0 * *count as f64 / 10_000.0;
            assert!(
                (empirical - share * 100.0).abs() < 1.5,
                "share {empirical}% vs target {}%",
                share * 100.0
            );
        }
    }

    #[test]
    fn invalid_thresholds_rejected() {
        let mut cfg = one_factor_config(10, 1, 0.8);
        cfg.item_thresholds[1] = [0.0, 0.0, 0.1, 0.2, 0.3, 0.4];
        assert!(matches!(
            cfg.validate(),
            Err(GeneratorError::BadThresholds(code)) if code == "I2"
        ));
    }

    #[test]
    fn excessive_communality_rejected() {
        let cfg = one_factor_config(10, 1, 1.2);
        assert!(matches!(
            cfg.validate(),
            Err(GeneratorError::ExcessiveCommunality { .. })
        ));
    }

    #[test]
    fn thresholds_reproduce_target_shares() {
        let target = [0.2, 0.6, 0.7, 2.1, 11.7, 56.4, 28.2];
        let t = thresholds_from_shares(&target);
        let mut cfg = one_factor_config(200_000, 5, 0.8);
        cfg.item_thresholds = vec![t; 3];
        let (ds, _) = simulate_survey_with_truth(&cfg, &one_factor_schema()).unwrap();
        let row = crate::survey::likert_distribution(&ds, "I1").unwrap();
        for (got, want) in row.shares.iter().zip(target) {
            assert!(
                (got - want).abs() < 0.75,
                "share {got:.2}% vs target {want:.2}%"
            );
        }
    }

    #[test]
    fn attenuation_factor_for_equiprobable_cuts() {
        let a = attenuation_factor(&equiprobable_thresholds());
        assert_abs_diff_eq!(a, 0.958, epsilon = 0.002);
    }
}
