//! Two-step measurement pruning: refit and drop the single weakest item
//! until every retained item loads at or above the threshold.

use super::paf::PafOptions;
use super::{fit_solution, EfaError, FactorSolution};
use crate::psych::pearson_correlation_matrix;
use crate::survey::SurveyDataset;

#[derive(Debug, Clone, Default)]
pub struct PruneTrace {
    /// Deleted item codes with their max |pattern loading| at deletion time,
    /// in deletion order.
    pub deleted: Vec<(String, f64)>,
}

/// Iteratively delete the worst-loading item until all retained items have a
/// max |pattern loading| >= `threshold`. Aborts when a deletion would leave a
/// factor with fewer than two assigned items.
pub fn prune_items(
    ds: &SurveyDataset,
    items: &[String],
    m: usize,
    threshold: f64,
    paf_options: &PafOptions,
    kappa: f64,
) -> Result<(Vec<String>, FactorSolution, PruneTrace), EfaError> {
    let mut retained: Vec<String> = items.to_vec();
    let mut trace = PruneTrace::default();

    // each deletion removes one item, so this terminates in <= p iterations
    loop {
        let corr = pearson_correlation_matrix(ds, &retained)?;
        let solution = fit_solution(&corr, m, paf_options, kappa)?;

        let max_loading: Vec<f64> = (0..solution.n_items())
            .map(|i| {
                solution
                    .pattern
                    .row(i)
                    .iter()
                    .fold(0.0f64, |a, &b| a.max(b.abs()))
            })
            .collect();

        let worst = (0..retained.len())
            .min_by(|&a, &b| max_loading[a].partial_cmp(&max_loading[b]).unwrap())
            .expect("at least one item");
        if max_loading[worst] >= threshold {
            return Ok((retained, solution, trace));
        }

        // factor membership by max |pattern loading|, excluding the item we
        // are about to drop
        let mut per_factor = vec![0usize; m];
        for i in 0..retained.len() {
            if i == worst {
                continue;
            }
            let assigned = (0..m)
                .max_by(|&a, &b| {
                    solution.pattern[(i, a)]
                        .abs()
                        .partial_cmp(&solution.pattern[(i, b)].abs())
                        .unwrap()
                })
                .unwrap();
            per_factor[assigned] += 1;
        }
        if let Some(factor) = per_factor.iter().position(|&count| count < 2) {
            return Err(EfaError::PruningBreaksFactor {
                factor: factor + 1,
                items_left: per_factor[factor],
            });
        }

        trace
            .deleted
            .push((retained[worst].clone(), max_loading[worst]));
        retained.remove(worst);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::{
        equiprobable_thresholds, simulate_survey, ClassSpec, GeneratorConfig,
    };
    use crate::survey::{IndicatorItem, Scale, SurveySchema};

    fn schema(p: usize) -> SurveySchema {
        let items: Vec<IndicatorItem> = (1..=p)
            .map(|i| IndicatorItem {
                code: format!("I{i}"),
                prompt: String::new(),
                scale: "s".into(),
            })
            .collect();
        let codes = items.iter().map(|i| i.code.clone()).collect();
        SurveySchema::new(
            "t",
            items,
            vec![Scale {
                id: "s".into(),
                name: String::new(),
                items: codes,
                attribute_set: false,
            }],
            vec![],
            vec![],
        )
        .unwrap()
    }

    fn two_factor_config(loadings: Vec<Vec<f64>>, n: usize, seed: u64) -> GeneratorConfig {
        let p = loadings.len();
        GeneratorConfig {
            n,
            seed,
            item_codes: (1..=p).map(|i| format!("I{i}")).collect(),
            loadings,
            factor_correlations: vec![vec![1.0, 0.2], vec![0.2, 1.0]],
            classes: vec![ClassSpec {
                share: 1.0,
                factor_means: vec![0.0; 2],
                factor_variances: vec![1.0; 2],
            }],
            item_thresholds: vec![equiprobable_thresholds(); p],
            attributes: vec![],
            covariates: vec![],
        }
    }

    #[test]
    fn strong_items_pass_untouched() {
        let loadings = vec![
            vec![0.85, 0.0],
            vec![0.80, 0.0],
            vec![0.75, 0.0],
            vec![0.0, 0.85],
            vec![0.0, 0.80],
            vec![0.0, 0.75],
        ];
        let cfg = two_factor_config(loadings, 2000, 21);
        let ds = simulate_survey(&cfg, &schema(6)).unwrap();
        let items: Vec<String> = (1..=6).map(|i| format!("I{i}")).collect();
        let (retained, _, trace) =
            prune_items(&ds, &items, 2, 0.5, &PafOptions::default(), 4.0).unwrap();
        assert_eq!(retained.len(), 6);
        assert!(trace.deleted.is_empty());
    }

    #[test]
    fn pure_noise_item_is_deleted_first() {
        let loadings = vec![
            vec![0.85, 0.0],
            vec![0.80, 0.0],
            vec![0.75, 0.0],
            vec![0.0, 0.85],
            vec![0.0, 0.80],
            vec![0.0, 0.75],
            vec![0.0, 0.0], // I7: pure noise
        ];
        let cfg = two_factor_config(loadings, 3000, 33);
        let ds = simulate_survey(&cfg, &schema(7)).unwrap();
        let items: Vec<String> = (1..=7).map(|i| format!("I{i}")).collect();
        let (retained, solution, trace) =
            prune_items(&ds, &items, 2, 0.5, &PafOptions::default(), 4.0).unwrap();
        assert_eq!(trace.deleted[0].0, "I7");
        assert_eq!(retained.len(), 6);
        assert!(!retained.contains(&"I7".to_string()));
        assert_eq!(solution.n_items(), 6);
    }

    #[test]
    fn pruning_that_would_break_a_factor_aborts() {
        // factor 2 carries too little common variance: after the junk item
        // goes, its two survivors settle near sqrt(r) < 0.5, so the next
        // deletion would leave a one-item factor
        let loadings = vec![
            vec![0.85, 0.0],
            vec![0.80, 0.0],
            vec![0.75, 0.0],
            vec![0.0, 0.55],
            vec![0.0, 0.30],
            vec![0.0, 0.05],
        ];
        let cfg = two_factor_config(loadings, 3000, 5);
        let ds = simulate_survey(&cfg, &schema(6)).unwrap();
        let items: Vec<String> = (1..=6).map(|i| format!("I{i}")).collect();
        let err = prune_items(&ds, &items, 2, 0.5, &PafOptions::default(), 4.0).unwrap_err();
        assert!(matches!(err, EfaError::PruningBreaksFactor { .. }), "got: {err}");
    }
}

