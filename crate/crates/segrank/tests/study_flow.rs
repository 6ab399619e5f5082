//! Survey-flow checks mirroring a realistic field-study shape: raw rows in,
//! malformed rows rejected at load, inconsistent rows dropped at cleaning,
//! and the screening diagnostics that gate the factor analysis.

use segrank::demo;
use segrank::lcca::{assign_classes, fit_em, profile_covariates, CovariateProfile, EmOptions};
use segrank::psych::{adequacy_report, pearson_correlation_matrix};
use segrank::simulate::simulate_survey;
use segrank::survey::{clean_dataset, load_dataset_from_reader, CovariateValue};

/// 1000 raw rows, 98 malformed, 63 failing the straight-line rule: the
/// loader keeps 902 and the cleaner keeps 839.
#[test]
fn field_study_shaped_cleaning_counts() {
    let schema = demo::schema();
    let mut csv = String::from("respondent_id");
    for code in schema.item_codes() {
        csv.push(',');
        csv.push_str(code);
    }
    csv.push('\n');

    let item_count = schema.item_codes().len();
    let mut wrote = 0;
    // 839 varied, rule-passing rows
    for i in 0..839 {
        csv.push_str(&format!("r{wrote}"));
        for j in 0..item_count {
            csv.push_str(&format!(",{}", 1 + (i + 2 * j) % 7));
        }
        csv.push('\n');
        wrote += 1;
    }
    // 63 complete rows that straight-line the whole attitude battery
    for i in 0..63 {
        csv.push_str(&format!("r{wrote}"));
        let level = 1 + i % 7;
        for _ in 0..item_count {
            csv.push_str(&format!(",{level}"));
        }
        csv.push('\n');
        wrote += 1;
    }
    // 98 malformed rows: out-of-range and non-integer cells
    for i in 0..98 {
        csv.push_str(&format!("r{wrote}"));
        for j in 0..item_count {
            if j == i % item_count {
                csv.push_str(if i % 2 == 0 { ",8" } else { ",x" });
            } else {
                csv.push_str(",4");
            }
        }
        csv.push('\n');
        wrote += 1;
    }
    assert_eq!(wrote, 1000);

    let (raw, load_report) =
        load_dataset_from_reader(csv.as_bytes(), &schema, "constructed").unwrap();
    assert_eq!(load_report.rows_read, 1000);
    assert_eq!(raw.len(), 902, "902 loadable records");
    assert_eq!(load_report.row_errors.len(), 98);

    // the straight-line rows load fine (they are valid Likert answers) and
    // fall to the consistency rule instead
    let (clean, report) = clean_dataset(&raw, &schema.rules).unwrap();
    assert_eq!(clean.len(), 839, "839 records employed");
    assert_eq!(report.dropped.len(), 63);
    assert!(report
        .dropped
        .iter()
        .all(|d| d.reason.as_str() == "inconsistent"));
}

/// Screening on generator output: the 17-item structure is emphatically not
/// spherical and comfortably adequate for factoring.
#[test]
fn generated_structure_passes_screening() {
    let schema = demo::schema();
    let ds = simulate_survey(&demo::measurement_benchmark_config(900, 4), &schema).unwrap();
    let retained: Vec<String> = demo::loading_targets()
        .iter()
        .map(|t| t.code.to_string())
        .collect();
    assert_eq!(retained.len(), 17);
    let corr = pearson_correlation_matrix(&ds, &retained).unwrap();
    let report = adequacy_report(&corr).unwrap();
    assert!(
        report.bartlett.p_value < 0.001,
        "sphericity p = {:.3e}",
        report.bartlett.p_value
    );
    assert_eq!(report.bartlett.df, 136);
    assert!(report.kmo.adequate, "KMO = {:.3}", report.kmo.overall);
}

/// Covariates never influence the fit; constant covariates profile
/// identically in every class; categorical shares sum to 100 per class; and
/// modal shares track posterior-sum shares on separated data.
#[test]
fn covariate_profiles_are_passive_and_consistent() {
    let schema = demo::schema();
    let mut ds = simulate_survey(&demo::generator_config(600, 9), &schema).unwrap();
    // overwrite one covariate with a constant
    for record in &mut ds.records {
        record.covariates.insert(
            "car_owner".into(),
            Some(CovariateValue::Categorical("yes".into())),
        );
    }

    // cluster on two well-separated synthetic score dimensions
    let scores = {
        use nalgebra::DMatrix;
        let n = ds.len();
        let data = DMatrix::from_fn(n, 1, |i, _| {
            let center = if i % 3 == 0 { -4.0 } else { 4.0 };
            center + (i as f64 * 0.618).sin() * 0.5
        });
        segrank::efa::FactorScores {
            respondent_ids: ds.records.iter().map(|r| r.respondent_id.clone()).collect(),
            factor_count: 1,
            scores: data,
        }
    };
    let (model, posterior, _) = fit_em(
        &scores,
        2,
        &EmOptions {
            restarts: 6,
            seed: 8,
            ..Default::default()
        },
    )
    .unwrap();

    let assignment = assign_classes(&posterior);
    // modal shares agree with posterior-mass shares on separated clusters
    for (c, modal) in assignment.shares.iter().enumerate() {
        let posterior_share = 100.0 * model.weights[c];
        assert!(
            (modal - posterior_share).abs() <= 1.0,
            "class {c}: modal {modal:.2}% vs posterior {posterior_share:.2}%"
        );
    }

    let covs = vec!["car_owner".to_string(), "gender".to_string()];
    let profiles = profile_covariates(&posterior, &ds, &covs).unwrap();
    for profile in &profiles {
        if let CovariateProfile::Categorical { code, class_shares, .. } = profile {
            for shares in class_shares {
                let sum: f64 = shares.iter().sum();
                assert!((sum - 100.0).abs() < 0.1, "{code}: shares sum {sum}");
            }
            if code == "car_owner" {
                // constant covariate: identical profile in every class
                for shares in class_shares {
                    assert_eq!(shares[0], 100.0);
                    assert_eq!(shares[1], 0.0);
                }
            }
        }
    }
}
