//! Latent-class clustering over factor scores: fit a range of class counts
//! by restarted EM, select by BIC, and profile the passive covariates.
//!
//!     cargo run --example cluster_respondents

use segrank::demo;
use segrank::efa::{factor_scores, prune_items, PafOptions};
use segrank::lcca::{
    assign_classes, class_factor_means, profile_covariates, select_model, CovariateProfile,
    EmOptions, SelectionCriterion,
};
use segrank::simulate::simulate_survey;

fn main() {
    let schema = demo::schema();
    let dataset = simulate_survey(&demo::generator_config(840, 42), &schema).unwrap();
    let items = schema.analysis_items();
    let (_, solution, _) =
        prune_items(&dataset, &items, 6, 0.50, &PafOptions::default(), 4.0).unwrap();
    let scores = factor_scores(&dataset, &solution).unwrap();

    let options = EmOptions {
        restarts: 10,
        seed: 42,
        ..Default::default()
    };
    let selected = select_model(&scores, 1..=3, SelectionCriterion::Bic, &options).unwrap();

    println!("model comparison:");
    println!("  k   log-likelihood        BIC");
    for row in &selected.comparison {
        println!(
            "  {}   {:14.2}  {:9.2}",
            row.k,
            row.log_likelihood.unwrap_or(f64::NAN),
            row.bic.unwrap_or(f64::NAN)
        );
    }
    println!("selected k = {} (restart {})", selected.model.k, selected.model.fit.restart_index);

    let assignment = assign_classes(&selected.posterior);
    println!("\nmodal class shares:");
    for (k, share) in assignment.shares.iter().enumerate() {
        println!("  class {}: {share:.1}%", k + 1);
    }

    let means = class_factor_means(&selected.posterior, &scores).unwrap();
    println!("\nclass factor means (rows = classes):");
    for c in 0..means.nrows() {
        print!("  class {}:", c + 1);
        for j in 0..means.ncols() {
            print!(" {:6.2}", means[(c, j)]);
        }
        println!();
    }

    let covariates = vec!["income".to_string(), "population_density".to_string()];
    println!("\npassive covariate profiles:");
    for profile in profile_covariates(&selected.posterior, &dataset, &covariates).unwrap() {
        match profile {
            CovariateProfile::Categorical { code, levels, class_shares, .. } => {
                println!("  {code}:");
                for (li, level) in levels.iter().enumerate() {
                    print!("    {level:12}");
                    for shares in &class_shares {
                        print!(" {:5.1}%", shares[li]);
                    }
                    println!();
                }
            }
            CovariateProfile::Continuous { code, class_means, overall } => {
                print!("  {code}: ");
                for mean in &class_means {
                    print!(" {mean:9.0}");
                }
                println!("  (overall {overall:.0})");
            }
        }
    }
}
