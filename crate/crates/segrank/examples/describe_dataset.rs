//! Load, clean and describe a survey: level distributions, weighted means,
//! scale reliabilities, and the classic sample-size figure.
//!
//!     cargo run --example describe_dataset

use segrank::demo;
use segrank::psych::cronbach_alpha;
use segrank::simulate::simulate_survey;
use segrank::survey::{clean_dataset, likert_distribution, required_sample_size, weighted_mean};

fn main() {
    let schema = demo::schema();
    let raw = simulate_survey(&demo::generator_config(1200, 3), &schema).unwrap();
    let (dataset, report) = clean_dataset(&raw, &schema.rules).unwrap();
    println!(
        "cleaning: {} in, {} kept, {} dropped",
        report.input_records,
        report.kept_records,
        report.dropped.len()
    );

    println!("\nitem distributions (percent per level):");
    println!("  item     1     2     3     4     5     6     7   mean");
    for code in ["I1", "I5", "I9", "I16"] {
        let row = likert_distribution(&dataset, code).unwrap();
        print!("  {code:4}");
        for share in row.shares {
            print!("  {share:4.1}");
        }
        println!("  {:5.2}", weighted_mean(&row));
    }

    println!("\nscale reliabilities:");
    for scale in dataset.schema.scales.iter().filter(|s| !s.attribute_set) {
        let alpha = cronbach_alpha(&dataset, scale).unwrap();
        println!(
            "  {:18} alpha = {:.3} (standardized {:.3}){}",
            alpha.scale_id,
            alpha.raw,
            alpha.standardized,
            if alpha.below_threshold { "  [below 0.70]" } else { "" }
        );
    }

    let n = required_sample_size(1.96, 0.5, 0.05).unwrap();
    println!("\nminimum sample for a 5% margin at 95% confidence: {n}");
}
