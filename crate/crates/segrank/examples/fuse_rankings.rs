//! Fuse method rankings into one meta ranking by footrule minimization,
//! using the bundled reference columns. Two reference panels are known to
//! violate unanimous method agreement; the optimizer reports the true
//! optimum and the difference is printed.
//!
//!     cargo run --example fuse_rankings

use segrank::rankagg::{
    aggregate, aggregate_bruteforce, AggregationPolicy, Metric, RankingEnsemble,
};
use segrank::demo;

fn main() {
    for battery in demo::reference_rankings() {
        println!("=== {} ===", battery.battery);
        for class in 0..3 {
            let ensemble = RankingEnsemble::new(
                battery.labels.iter().map(|s| s.to_string()).collect(),
                vec![
                    battery.moora[class].to_vec(),
                    battery.topsis[class].to_vec(),
                    battery.vikor[class].to_vec(),
                ],
            )
            .unwrap();
            let fused = aggregate_bruteforce(&ensemble, Metric::Footrule).unwrap();
            let recorded = battery.recorded_meta[class];
            let marker = if fused.meta == recorded {
                "matches the recorded column"
            } else {
                "differs from the recorded column (it violates unanimity)"
            };
            println!(
                "  class {}: meta {:?}, objective {}, ties {} -- {marker}",
                class + 1,
                fused.meta,
                fused.objective,
                fused.tie_count
            );
        }
    }

    // the dispatcher switches to cross-entropy beyond the exhaustive bound
    let wide: Vec<Vec<usize>> = vec![
        (1..=12).collect(),
        (1..=12).rev().collect(),
        (1..=12).map(|r| if r <= 6 { r + 6 } else { r - 6 }).collect(),
    ];
    let labels = (0..12).map(|i| format!("item{i}")).collect();
    let ensemble = RankingEnsemble::new(labels, wide).unwrap();
    let result = aggregate(&ensemble, &AggregationPolicy::default()).unwrap();
    println!(
        "\n12-item ensemble: {:?} path, objective {}, seed {:?}",
        result.method, result.objective, result.seed
    );
}
