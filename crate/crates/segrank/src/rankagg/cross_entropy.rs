//! Cross-entropy Monte Carlo over permutations for large ensembles.

use super::{AggregationMethod, AggregationResult, Metric, RankingEnsemble};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct CeParams {
    pub seed: u64,
    /// Samples per iteration; 0 means `50 * a^2`.
    pub samples: usize,
    /// Elite fraction used for the probability update.
    pub rho: f64,
    /// Stop after this many iterations without improving the best objective.
    pub max_stagnation: usize,
    pub max_iterations: usize,
    /// Smoothing weight of the probability-matrix update.
    pub learning_rate: f64,
}

impl Default for CeParams {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 0,
            rho: 0.1,
            max_stagnation: 15,
            max_iterations: 250,
            learning_rate: 0.5,
        }
    }
}

/// Sample a rank vector from the item-by-rank probability matrix: fill rank
/// slots 1..=a in order, drawing an unused item proportionally to its
/// probability for that slot.
fn sample_ranking(probs: &[Vec<f64>], rng: &mut ChaCha8Rng, out: &mut Vec<usize>) {
    let a = probs.len();
    out.clear();
    out.resize(a, 0);
    let mut used = vec![false; a];
    #[allow(clippy::needless_range_loop)]
    for rank in 0..a {
        let total: f64 = (0..a)
            .filter(|&item| !used[item])
            .map(|item| probs[item][rank])
            .sum();
        let mut chosen = usize::MAX;
        if total > 0.0 {
            let mut u: f64 = rng.random::<f64>() * total;
            for item in 0..a {
                if used[item] {
                    continue;
                }
                u -= probs[item][rank];
                if u <= 0.0 {
                    chosen = item;
                    break;
                }
            }
        }
        if chosen == usize::MAX {
            chosen = (0..a).find(|&item| !used[item]).expect("item left");
        }
        used[chosen] = true;
        out[chosen] = rank + 1;
    }
}

/// Borda-style seed candidate: items ordered by mean input rank.
fn mean_rank_candidate(ensemble: &RankingEnsemble) -> Vec<usize> {
    let a = ensemble.n_items();
    let mut mean = vec![0.0f64; a];
    for input in &ensemble.inputs {
        for (item, &rank) in input.iter().enumerate() {
            mean[item] += rank as f64;
        }
    }
    let mut order: Vec<usize> = (0..a).collect();
    order.sort_by(|&x, &y| mean[x].partial_cmp(&mean[y]).unwrap().then(x.cmp(&y)));
    let mut ranks = vec![0usize; a];
    for (position, &item) in order.iter().enumerate() {
        ranks[item] = position + 1;
    }
    ranks
}

/// Keep the better candidate under (objective, lexicographic rank vector).
fn better(
    objective: f64,
    candidate: &[usize],
    best_objective: f64,
    best: &[usize],
) -> bool {
    objective < best_objective || (objective == best_objective && candidate < best)
}

/// Cross-entropy search. Deterministic given the seed; the inputs and a
/// mean-rank heuristic seed the candidate pool, so the result is never worse
/// than any single input ranking.
pub fn aggregate_cross_entropy(
    ensemble: &RankingEnsemble,
    metric: Metric,
    params: &CeParams,
) -> AggregationResult {
    let a = ensemble.n_items();
    let samples = if params.samples == 0 {
        50 * a * a
    } else {
        params.samples
    };
    let elite = ((params.rho * samples as f64).ceil() as usize).clamp(1, samples);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    // screen the inputs and the mean-rank candidate first
    let mut best: Vec<usize> = ensemble.inputs[0].clone();
    let mut best_objective = ensemble.objective(&best, metric);
    for candidate in ensemble
        .inputs
        .iter()
        .skip(1)
        .chain(std::iter::once(&mean_rank_candidate(ensemble)))
    {
        let objective = ensemble.objective(candidate, metric);
        if better(objective, candidate, best_objective, &best) {
            best_objective = objective;
            best = candidate.clone();
        }
    }

    // item-by-rank probability matrix, uniform start
    let mut probs = vec![vec![1.0 / a as f64; a]; a];
    let mut stagnation = 0usize;
    let mut scratch = Vec::new();
    let mut pool: Vec<(f64, Vec<usize>)> = Vec::with_capacity(samples);

    for _ in 0..params.max_iterations {
        pool.clear();
        for _ in 0..samples {
            sample_ranking(&probs, &mut rng, &mut scratch);
            let objective = ensemble.objective(&scratch, metric);
            pool.push((objective, scratch.clone()));
        }
        pool.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap().then_with(|| x.1.cmp(&y.1)));

        let (top_objective, top) = &pool[0];
        if better(*top_objective, top, best_objective, &best) {
            best_objective = *top_objective;
            best = top.clone();
            stagnation = 0;
        } else {
            stagnation += 1;
            if stagnation >= params.max_stagnation {
                break;
            }
        }

        // elite frequency update with smoothing
        let mut freq = vec![vec![0.0f64; a]; a];
        for (_, candidate) in pool.iter().take(elite) {
            for (item, &rank) in candidate.iter().enumerate() {
                freq[item][rank - 1] += 1.0 / elite as f64;
            }
        }
        for item in 0..a {
            for rank in 0..a {
                probs[item][rank] = (1.0 - params.learning_rate) * probs[item][rank]
                    + params.learning_rate * freq[item][rank];
            }
        }
    }

    AggregationResult {
        labels: ensemble.labels.clone(),
        meta: best,
        objective: best_objective,
        metric,
        method: AggregationMethod::CrossEntropy,
        optimal: false,
        seed: Some(params.seed),
        tie_count: 0,
    }
}

#[cfg(test)]
mod tests {
    use super::super::aggregate_bruteforce;
    use super::*;
    use rand::seq::SliceRandom;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("x{i}")).collect()
    }

    #[test]
    fn unanimous_ensemble_returns_the_shared_ranking() {
        let ranks = vec![4, 2, 1, 3];
        let ens = RankingEnsemble::new(labels(4), vec![ranks.clone(); 3]).unwrap();
        let result = aggregate_cross_entropy(&ens, Metric::Footrule, &CeParams::default());
        assert_eq!(result.meta, ranks);
        assert_eq!(result.objective, 0.0);
    }

    #[test]
    fn matches_brute_force_on_small_ensembles() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for a in [4usize, 5, 6] {
            for trial in 0..4 {
                let inputs: Vec<Vec<usize>> = (0..3)
                    .map(|_| {
                        let mut p: Vec<usize> = (1..=a).collect();
                        p.shuffle(&mut rng);
                        p
                    })
                    .collect();
                let ens = RankingEnsemble::new(labels(a), inputs).unwrap();
                let exact = aggregate_bruteforce(&ens, Metric::Footrule).unwrap();
                for seed in 0..5 {
                    let params = CeParams { seed, ..Default::default() };
                    let ce = aggregate_cross_entropy(&ens, Metric::Footrule, &params);
                    assert_eq!(
                        ce.objective, exact.objective,
                        "a={a} trial={trial} seed={seed}"
                    );
                }
            }
        }
    }

    #[test]
    fn never_worse_than_any_input_ranking() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let a = 12;
        let inputs: Vec<Vec<usize>> = (0..3)
            .map(|_| {
                let mut p: Vec<usize> = (1..=a).collect();
                p.shuffle(&mut rng);
                p
            })
            .collect();
        let ens = RankingEnsemble::new(labels(a), inputs.clone()).unwrap();
        let result = aggregate_cross_entropy(&ens, Metric::Footrule, &CeParams::default());
        for input in &inputs {
            assert!(result.objective <= ens.objective(input, Metric::Footrule));
        }
    }
}
