//! Exhaustive meta-ranking: scan every candidate permutation.

use super::{AggError, AggregationMethod, AggregationResult, Metric, RankingEnsemble};
use rayon::prelude::*;

/// Inclusive alternative-count bound: 8! = 40320 candidates.
pub const BRUTE_FORCE_LIMIT: usize = 8;

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// The `index`-th permutation of (1..=a) in lexicographic order.
fn permutation_at(mut index: usize, a: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (1..=a).collect();
    let mut out = Vec::with_capacity(a);
    for position in (0..a).rev() {
        let f = factorial(position);
        let digit = index / f;
        index %= f;
        out.push(pool.remove(digit));
    }
    out
}

/// Minimize the weighted distance sum over all a! candidate rankings.
/// Ties among optima resolve to the lexicographically smallest candidate;
/// the tie count is reported.
pub fn aggregate_bruteforce(
    ensemble: &RankingEnsemble,
    metric: Metric,
) -> Result<AggregationResult, AggError> {
    let a = ensemble.n_items();
    if a > BRUTE_FORCE_LIMIT {
        return Err(AggError::TooManyForBruteForce {
            a,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let total = factorial(a);

    // deterministic parallel reduction: (objective, lexicographic index)
    // is a total order, so the fold result is chunking-independent
    let (best_objective, best_index, tie_count) = (0..total)
        .into_par_iter()
        .fold(
            || (f64::INFINITY, usize::MAX, 0usize),
            |(mut best, mut best_idx, mut ties), idx| {
                let candidate = permutation_at(idx, a);
                let objective = ensemble.objective(&candidate, metric);
                if objective < best {
                    best = objective;
                    best_idx = idx;
                    ties = 1;
                } else if objective == best {
                    ties += 1;
                    if idx < best_idx {
                        best_idx = idx;
                    }
                }
                (best, best_idx, ties)
            },
        )
        .reduce(
            || (f64::INFINITY, usize::MAX, 0usize),
            |a, b| {
                if a.0 < b.0 {
                    a
                } else if b.0 < a.0 {
                    b
                } else {
                    (a.0, a.1.min(b.1), a.2 + b.2)
                }
            },
        );

    let meta = permutation_at(best_index, a);
    Ok(AggregationResult {
        labels: ensemble.labels.clone(),
        meta,
        objective: best_objective,
        metric,
        method: AggregationMethod::BruteForce,
        optimal: true,
        seed: None,
        tie_count,
    })
}
