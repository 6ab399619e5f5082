//! Generate a synthetic ride-hailing attitude survey from the bundled
//! three-class preset and show how closely the sample tracks its targets.
//!
//!     cargo run --example simulate_survey

use segrank::demo;
use segrank::simulate::simulate_survey_with_truth;
use segrank::survey::{likert_distribution, weighted_mean};

fn main() {
    let schema = demo::schema();
    let config = demo::generator_config(4000, 7);
    let (dataset, truth) = simulate_survey_with_truth(&config, &schema).unwrap();

    println!(
        "simulated {} respondents over {} items and {} covariates",
        dataset.len(),
        dataset.schema.item_codes().len(),
        dataset.schema.covariates.len()
    );

    let mut counts = vec![0usize; config.classes.len()];
    for &class in &truth.class_labels {
        counts[class] += 1;
    }
    println!("\nclass composition (target vs sample):");
    for (k, (count, class)) in counts.iter().zip(&config.classes).enumerate() {
        println!(
            "  class {}: {:.1}% target, {:.1}% sampled",
            k + 1,
            100.0 * class.share,
            100.0 * *count as f64 / dataset.len() as f64
        );
    }

    println!("\nitem marginals vs calibration targets (first four items):");
    println!("  item  target-mean  sample-mean");
    for target in demo::reference_item_distributions().iter().take(4) {
        let row = likert_distribution(&dataset, target.code).unwrap();
        println!(
            "  {:4}  {:10.2}  {:10.2}",
            target.code,
            target.mean,
            weighted_mean(&row)
        );
    }

    let out = std::env::temp_dir().join("segrank_simulated_survey.csv");
    let mut file = std::fs::File::create(&out).unwrap();
    dataset.to_csv(&mut file).unwrap();
    println!("\nwrote the full dataset to {}", out.display());
}
