//! Meta-ranking: fuse several total-order rankings of the same items into
//! one consensus ranking by minimizing the weighted sum of rank distances.
//!
//! Small problems are solved exactly by exhaustive search; larger ones by a
//! seeded cross-entropy Monte Carlo over permutations.

mod brute;
mod cross_entropy;
mod distance;

pub use brute::aggregate_bruteforce;
pub use cross_entropy::{aggregate_cross_entropy, CeParams};
pub use distance::{footrule_distance, kendall_distance, Ranking};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AggError {
    #[error("ensemble has no input rankings")]
    EmptyEnsemble,
    #[error("input {0} is not a permutation of 1..=a")]
    NotAPermutation(usize),
    #[error("rankings are over different labels")]
    LabelMismatch,
    #[error("{have} weights for {need} inputs")]
    WeightMismatch { have: usize, need: usize },
    #[error("{a} alternatives exceed the exhaustive-search limit {limit}; use the cross-entropy path")]
    TooManyForBruteForce { a: usize, limit: usize },
    #[error("need at least 2 alternatives")]
    TooFewAlternatives,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    /// Sum of absolute rank displacements.
    Footrule,
    /// Number of discordant pairs.
    Kendall,
}

impl Metric {
    pub fn distance(&self, a: &[usize], b: &[usize]) -> u64 {
        match self {
            Metric::Footrule => distance::footrule_raw(a, b),
            Metric::Kendall => distance::kendall_raw(a, b),
        }
    }
}

/// Input rankings over shared labels, with per-input importance weights
/// (1.0 each by default, making the objective a plain distance sum).
#[derive(Debug, Clone)]
pub struct RankingEnsemble {
    pub labels: Vec<String>,
    /// Each inner vector assigns a rank (1 = best) to the label at the same
    /// position; every input must be a total order.
    pub inputs: Vec<Vec<usize>>,
    pub weights: Vec<f64>,
}

impl RankingEnsemble {
    pub fn new(labels: Vec<String>, inputs: Vec<Vec<usize>>) -> Result<Self, AggError> {
        let weights = vec![1.0; inputs.len()];
        Self::with_weights(labels, inputs, weights)
    }

    pub fn with_weights(
        labels: Vec<String>,
        inputs: Vec<Vec<usize>>,
        weights: Vec<f64>,
    ) -> Result<Self, AggError> {
        if inputs.is_empty() {
            return Err(AggError::EmptyEnsemble);
        }
        if weights.len() != inputs.len() {
            return Err(AggError::WeightMismatch {
                have: weights.len(),
                need: inputs.len(),
            });
        }
        let a = labels.len();
        if a < 2 {
            return Err(AggError::TooFewAlternatives);
        }
        for (idx, input) in inputs.iter().enumerate() {
            if !is_permutation(input, a) {
                return Err(AggError::NotAPermutation(idx));
            }
        }
        Ok(Self {
            labels,
            inputs,
            weights,
        })
    }

    pub fn n_items(&self) -> usize {
        self.labels.len()
    }

    /// Weighted total distance of a candidate ranking to the inputs.
    pub fn objective(&self, candidate: &[usize], metric: Metric) -> f64 {
        self.inputs
            .iter()
            .zip(&self.weights)
            .map(|(input, &w)| w * metric.distance(candidate, input) as f64)
            .sum()
    }
}

pub(crate) fn is_permutation(ranks: &[usize], a: usize) -> bool {
    if ranks.len() != a {
        return false;
    }
    let mut seen = vec![false; a + 1];
    for &r in ranks {
        if r == 0 || r > a || seen[r] {
            return false;
        }
        seen[r] = true;
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AggregationMethod {
    BruteForce,
    CrossEntropy,
}

/// A fused ranking with its verifiable objective value.
#[derive(Debug, Clone)]
pub struct AggregationResult {
    pub labels: Vec<String>,
    /// Consensus ranks, one per label (a total order).
    pub meta: Vec<usize>,
    /// Weighted total distance of `meta` to the inputs.
    pub objective: f64,
    pub metric: Metric,
    pub method: AggregationMethod,
    /// True only when the exhaustive path proved global optimality.
    pub optimal: bool,
    /// Seed of the stochastic search, when one ran.
    pub seed: Option<u64>,
    /// Number of permutations sharing the optimal objective (exhaustive
    /// path only; the lexicographically smallest is reported).
    pub tie_count: usize,
}

/// Dispatch policy for [`aggregate`].
#[derive(Debug, Clone)]
pub struct AggregationPolicy {
    pub metric: Metric,
    /// Inclusive alternative-count bound for the exhaustive path.
    pub brute_force_limit: usize,
    pub cross_entropy: CeParams,
}

impl Default for AggregationPolicy {
    fn default() -> Self {
        Self {
            metric: Metric::Footrule,
            brute_force_limit: 8,
            cross_entropy: CeParams::default(),
        }
    }
}

/// Exhaustive search up to the policy bound (inclusive), cross-entropy
/// beyond it.
pub fn aggregate(
    ensemble: &RankingEnsemble,
    policy: &AggregationPolicy,
) -> Result<AggregationResult, AggError> {
    if ensemble.n_items() <= policy.brute_force_limit {
        aggregate_bruteforce(ensemble, policy.metric)
    } else {
        Ok(aggregate_cross_entropy(
            ensemble,
            policy.metric,
            &policy.cross_entropy,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labeled(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("item{i}")).collect()
    }

    #[test]
    fn ensemble_validates_permutations() {
        let err = RankingEnsemble::new(labeled(3), vec![vec![1, 2, 2]]).unwrap_err();
        assert!(matches!(err, AggError::NotAPermutation(0)));
        let err = RankingEnsemble::new(labeled(3), vec![]).unwrap_err();
        assert!(matches!(err, AggError::EmptyEnsemble));
    }

    #[test]
    fn dispatch_selects_path_by_size() {
        let ens6 = RankingEnsemble::new(
            labeled(6),
            vec![vec![1, 2, 3, 4, 5, 6], vec![2, 1, 3, 4, 5, 6]],
        )
        .unwrap();
        let result = aggregate(&ens6, &AggregationPolicy::default()).unwrap();
        assert_eq!(result.method, AggregationMethod::BruteForce);
        assert!(result.optimal);

        let ranks12: Vec<usize> = (1..=12).collect();
        let ens12 = RankingEnsemble::new(labeled(12), vec![ranks12.clone(), ranks12]).unwrap();
        let result = aggregate(&ens12, &AggregationPolicy::default()).unwrap();
        assert_eq!(result.method, AggregationMethod::CrossEntropy);
        assert!(!result.optimal);

        let ranks8: Vec<usize> = (1..=8).collect();
        let ens8 = RankingEnsemble::new(labeled(8), vec![ranks8.clone(), ranks8]).unwrap();
        let result = aggregate(&ens8, &AggregationPolicy::default()).unwrap();
        assert_eq!(result.method, AggregationMethod::BruteForce, "bound is inclusive");
    }
}
