//! Principal-axis extraction with promax rotation and two-step pruning:
//! weak items are deleted one at a time until every survivor loads at 0.50.
//!
//!     cargo run --example extract_factors

use segrank::demo;
use segrank::efa::{
    factor_scores, initial_variance_share, prune_items, suggest_n_factors, variance_explained,
    PafOptions,
};
use segrank::psych::pearson_correlation_matrix;
use segrank::simulate::simulate_survey;

fn main() {
    let schema = demo::schema();
    let dataset = simulate_survey(&demo::measurement_benchmark_config(5000, 12), &schema).unwrap();
    let items = schema.analysis_items();

    let corr = pearson_correlation_matrix(&dataset, &items).unwrap();
    let eigenvalues = segrank::linalg::eigenvalues_desc(&corr.values);
    let suggestion = suggest_n_factors(&eigenvalues).unwrap();
    println!(
        "scree suggestion: {} factors{}",
        suggestion.n_factors,
        if suggestion.weak_elbow { " (weak elbow)" } else { "" }
    );

    let (retained, solution, trace) =
        prune_items(&dataset, &items, 6, 0.50, &PafOptions::default(), 4.0).unwrap();
    for (code, loading) in &trace.deleted {
        println!("pruned {code} (max |loading| {loading:.3})");
    }

    println!("\nrotated pattern loadings ({} items retained):", retained.len());
    print!("  item ");
    for j in 1..=solution.n_factors() {
        print!("     F{j}");
    }
    println!("     h2");
    for (i, code) in solution.items.iter().enumerate() {
        print!("  {code:4} ");
        for j in 0..solution.n_factors() {
            let value = solution.pattern[(i, j)];
            if value.abs() >= 0.30 {
                print!(" {value:6.3}");
            } else {
                print!("       ");
            }
        }
        println!(" {:6.3}", solution.communalities[i]);
    }

    println!(
        "\nvariance explained: {:.1}% (reduced spectrum), {:.1}% (initial spectrum)",
        variance_explained(&solution),
        initial_variance_share(&solution)
    );

    let scores = factor_scores(&dataset, &solution).unwrap();
    println!(
        "factor scores: {} respondents x {} factors, first row {:?}",
        scores.n(),
        scores.factor_count,
        (0..scores.factor_count)
            .map(|j| (scores.scores[(0, j)] * 1000.0).round() / 1000.0)
            .collect::<Vec<_>>()
    );
}
