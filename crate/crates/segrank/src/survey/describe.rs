//! Descriptive statistics: per-item level distributions, weighted means,
//! and the classic sample-size formula.

use super::{SurveyDataset, SurveyError};

/// Percentage of respondents choosing each of the 7 levels for one item.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionRow {
    pub item: String,
    /// Shares in percent for levels 1..=7; non-negative, summing to 100
    /// up to rounding.
    pub shares: [f64; 7],
    pub n: usize,
}

impl DistributionRow {
    pub fn new(item: &str, shares: [f64; 7], n: usize) -> Result<Self, SurveyError> {
        let sum: f64 = shares.iter().sum();
        if shares.iter().any(|&s| s < 0.0) || (sum - 100.0).abs() > 0.1 + 1e-9 {
            return Err(SurveyError::Invalid(format!(
                "distribution shares for {item} sum to {sum:.3}, expected 100 +/- 0.1"
            )));
        }
        Ok(Self {
            item: item.to_string(),
            shares,
            n,
        })
    }
}

/// Level shares for one item over all (cleaned) records.
pub fn likert_distribution(
    ds: &SurveyDataset,
    item: &str,
) -> Result<DistributionRow, SurveyError> {
    if !ds.schema.has_item(item) {
        return Err(SurveyError::UnknownItem(item.to_string()));
    }
    let mut counts = [0usize; 7];
    let mut n = 0usize;
    for record in &ds.records {
        let value = record.response(item).ok_or_else(|| SurveyError::MissingResponse {
            respondent: record.respondent_id.clone(),
            item: item.to_string(),
        })?;
        counts[value.index()] += 1;
        n += 1;
    }
    if n == 0 {
        return Err(SurveyError::Invalid(format!("no responses for item {item}")));
    }
    let mut shares = [0.0; 7];
    for (share, count) in shares.iter_mut().zip(counts) {
        *share = 100.0 * count as f64 / n as f64;
    }
    Ok(DistributionRow {
        item: item.to_string(),
        shares,
        n,
    })
}

/// Mean response level implied by a distribution row:
/// `sum_k k * share_k / 100`.
pub fn weighted_mean(row: &DistributionRow) -> f64 {
    row.shares
        .iter()
        .enumerate()
        .map(|(idx, share)| (idx as f64 + 1.0) * share)
        .sum::<f64>()
        / 100.0
}

/// Minimum sample size for estimating a proportion `p` with margin `e` at
/// confidence multiplier `z`: `floor(z^2 p (1-p) / e^2)`.
///
/// Floor (not ceiling) is the rounding convention here; a tiny epsilon keeps
/// exact-integer quotients from being floored down by float error.
pub fn required_sample_size(z: f64, p: f64, e: f64) -> Result<u64, SurveyError> {
    if z <= 0.0 || z.is_nan() {
        return Err(SurveyError::Invalid(format!("z must be positive, got {z}")));
    }
    if !(0.0 < p && p < 1.0) {
        return Err(SurveyError::Invalid(format!("p must lie in (0,1), got {p}")));
    }
    if !(0.0 < e && e < 1.0) {
        return Err(SurveyError::Invalid(format!("e must lie in (0,1), got {e}")));
    }
    let raw = z * z * p * (1.0 - p) / (e * e);
    Ok((raw + 1e-9).floor() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::survey::load::load_dataset_from_reader;
    use crate::survey::schema::{IndicatorItem, Scale, SurveySchema};
    use approx::assert_abs_diff_eq;

    fn one_item_ds(values: &[u8]) -> SurveyDataset {
        let schema = SurveySchema::new(
            "t",
            vec![
                IndicatorItem { code: "I1".into(), prompt: String::new(), scale: "s".into() },
                IndicatorItem { code: "I2".into(), prompt: String::new(), scale: "s".into() },
            ],
            vec![Scale {
                id: "s".into(),
                name: String::new(),
                items: vec!["I1".into(), "I2".into()],
                attribute_set: false,
            }],
            vec![],
            vec![],
        )
        .unwrap();
        let rows: String = values
            .iter()
            .enumerate()
            .map(|(i, v)| format!("r{i},{v},{v}\n"))
            .collect();
        let csv = format!("respondent_id,I1,I2\n{rows}");
        load_dataset_from_reader(csv.as_bytes(), &schema, "mem").unwrap().0
    }

    #[test]
    fn distribution_counts_levels() {
        let ds = one_item_ds(&[5, 5, 6, 7]);
        let row = likert_distribution(&ds, "I1").unwrap();
        assert_eq!(row.shares, [0.0, 0.0, 0.0, 0.0, 50.0, 25.0, 25.0]);
        assert_eq!(row.n, 4);
    }

    #[test]
    fn constant_answers_concentrate_on_one_level() {
        let ds = one_item_ds(&[4, 4, 4, 4, 4]);
        let row = likert_distribution(&ds, "I1").unwrap();
        assert_eq!(row.shares, [0.0, 0.0, 0.0, 100.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn unknown_item_is_rejected() {
        let ds = one_item_ds(&[4]);
        assert!(matches!(
            likert_distribution(&ds, "nope"),
            Err(SurveyError::UnknownItem(_))
        ));
    }

    #[test]
    fn weighted_mean_matches_reference_rows() {
        // Published distribution rows for two personal-vehicle items.
        let i5 = DistributionRow::new("I5", [0.2, 0.6, 0.7, 2.1, 11.7, 56.4, 28.2], 839).unwrap();
        assert_abs_diff_eq!(weighted_mean(&i5), 6.062, epsilon = 1e-9);
        assert!((weighted_mean(&i5) - 6.07).abs() < 0.02);

        let i7 = DistributionRow::new("I7", [0.4, 0.1, 0.1, 2.1, 7.5, 55.8, 34.0], 839).unwrap();
        assert_abs_diff_eq!(weighted_mean(&i7), 6.196, epsilon = 1e-9);
        assert!((weighted_mean(&i7) - 6.20).abs() < 0.02);
    }

    #[test]
    fn uniform_shares_average_to_midpoint() {
        let uniform = DistributionRow::new("u", [100.0 / 7.0; 7], 7).unwrap();
        assert_abs_diff_eq!(weighted_mean(&uniform), 4.0, epsilon = 1e-12);
    }

    #[test]
    fn sample_size_reference_values() {
        assert_eq!(required_sample_size(1.96, 0.5, 0.05).unwrap(), 384);
        assert_eq!(required_sample_size(1.96, 0.5, 0.10).unwrap(), 96);
        assert_eq!(required_sample_size(2.5758, 0.5, 0.05).unwrap(), 663);
    }

    #[test]
    fn sample_size_rejects_bad_domains() {
        assert!(required_sample_size(0.0, 0.5, 0.05).is_err());
        assert!(required_sample_size(1.96, 1.0, 0.05).is_err());
        assert!(required_sample_size(1.96, 0.5, 0.0).is_err());
    }

    #[test]
    fn sample_size_monotonicity() {
        let mut prev = u64::MAX;
        for e in [0.01, 0.02, 0.05, 0.1, 0.2, 0.5] {
            let n = required_sample_size(1.96, 0.5, e).unwrap();
            assert!(n <= prev, "not nonincreasing in e");
            prev = n;
        }
        let mut prev = 0;
        for z in [0.5, 1.0, 1.645, 1.96, 2.5758, 3.0] {
            let n = required_sample_size(z, 0.5, 0.05).unwrap();
            assert!(n >= prev, "not nondecreasing in z");
            prev = n;
        }
    }
}
