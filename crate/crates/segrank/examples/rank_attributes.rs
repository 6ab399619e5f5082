//! Rank the motivator attributes for one respondent class with all three
//! methods: the decision matrix is built from the class's own response
//! shares (agreement levels as benefit criteria, disagreement as cost).
//!
//!     cargo run --example rank_attributes

use segrank::demo;
use segrank::mcdm::{
    build_decision_matrix, moora_rank, topsis_rank, vikor_rank, AttributeKind,
    MatrixConstruction,
};
use segrank::simulate::simulate_survey_with_truth;

fn main() {
    let schema = demo::schema();
    let (dataset, truth) =
        simulate_survey_with_truth(&demo::generator_config(1000, 21), &schema).unwrap();

    // class 1 members according to the generating labels
    let members: Vec<usize> = (0..dataset.len())
        .filter(|&i| truth.class_labels[i] == 0)
        .collect();
    println!("class 1 has {} members", members.len());

    let items: Vec<String> = demo::MOTIVATOR_CODES.iter().map(|s| s.to_string()).collect();
    let (dm, warnings) = build_decision_matrix(
        &dataset,
        &members,
        &items,
        AttributeKind::Motivator,
        &MatrixConstruction::default(),
    )
    .unwrap();
    for warning in warnings {
        println!("note: {warning}");
    }

    println!("\ndecision matrix (rows = attributes, columns = level shares %):");
    print!("  attribute      ");
    for criterion in &dm.criteria {
        print!(" {:>8}", criterion.name);
    }
    println!();
    for (i, label) in demo::MOTIVATOR_LABELS.iter().enumerate() {
        print!("  {label:15}");
        for j in 0..dm.n_criteria() {
            print!(" {:8.1}", dm.values[(i, j)]);
        }
        println!();
    }

    let moora = moora_rank(&dm).unwrap();
    let topsis = topsis_rank(&dm).unwrap();
    let vikor = vikor_rank(&dm, 0.5).unwrap();

    println!("\nrankings (1 = most important):");
    println!("  attribute        MOORA  TOPSIS  VIKOR");
    for (i, label) in demo::MOTIVATOR_LABELS.iter().enumerate() {
        println!(
            "  {label:15}  {:5}  {:6}  {:5}",
            moora.ranks.competition[i], topsis.ranks.competition[i], vikor.ranks.competition[i]
        );
    }

    let diag = vikor.vikor.as_ref().unwrap();
    println!(
        "\nVIKOR compromise checks: acceptable advantage = {}, acceptable stability = {}",
        diag.acceptable_advantage, diag.acceptable_stability
    );
}
