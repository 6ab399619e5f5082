//! Sampling-adequacy diagnostics that gate the factor analysis: the KMO
//! measure and Bartlett's test of sphericity.
//!
//!     cargo run --example screen_adequacy

use segrank::demo;
use segrank::psych::{adequacy_report, pearson_correlation_matrix};
use segrank::simulate::simulate_survey;

fn main() {
    let schema = demo::schema();
    let dataset = simulate_survey(&demo::generator_config(1500, 11), &schema).unwrap();
    let items = schema.analysis_items();
    let corr = pearson_correlation_matrix(&dataset, &items).unwrap();
    let report = adequacy_report(&corr).unwrap();

    println!(
        "overall KMO = {:.3} ({})",
        report.kmo.overall,
        if report.kmo.adequate { "adequate" } else { "inadequate" }
    );
    println!("weakest per-item adequacy:");
    let mut msa = report.kmo.msa.clone();
    msa.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    for (code, value) in msa.iter().take(5) {
        println!("  {code:4} MSA = {value:.3}");
    }

    println!(
        "\nBartlett sphericity: chi2 = {:.1}, df = {}, p = {:.3e}",
        report.bartlett.chi2, report.bartlett.df, report.bartlett.p_value
    );
    if report.bartlett.p_value < 0.001 {
        println!("the correlation matrix is clearly not an identity: factoring is justified");
    }
}
