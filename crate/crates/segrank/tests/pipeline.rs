//! End-to-end pipeline behavior: staged orchestration, artifact layout,
//! stage-tagged failure handling, and report shapes.

use segrank::pipeline::{
    run_pipeline, run_pipeline_to, simulate_to_files, InputSection, NFactors, OutputSection,
    PipelineConfig, Stage, TargetStage,
};

fn demo_config(base: &std::path::Path, n: usize, seed: u64) -> PipelineConfig {
    let data_dir = base.join("data");
    let mut config = PipelineConfig {
        seed,
        input: InputSection {
            data: data_dir.join("survey.csv"),
            schema: None,
            schema_preset: Some("rhs-demo".into()),
        },
        output: OutputSection { dir: data_dir },
        efa: Default::default(),
        lcca: Default::default(),
        mcdm: Default::default(),
        aggregation: Default::default(),
        generator: Default::default(),
    };
    config.efa.n_factors = NFactors::Fixed(6);
    config.lcca.k_max = 3;
    config.lcca.restarts = 10;
    config.generator.n = Some(n);
    config
}

#[test]
fn full_run_emits_per_class_ranking_tables_with_meta_columns() {
    let base = tempfile::tempdir().unwrap();
    let config = demo_config(base.path(), 840, 42);
    simulate_to_files(&config).unwrap();

    let mut run_config = config.clone();
    run_config.output.dir = base.path().join("out");
    let report = run_pipeline(&run_config).unwrap();

    // two attribute batteries x three classes: six fused ranking problems
    let aggregation_files: Vec<_> = report
        .artifact_paths()
        .into_iter()
        .filter(|p| {
            p.file_name()
                .unwrap()
                .to_string_lossy()
                .starts_with("aggregation_")
        })
        .collect();
    assert_eq!(aggregation_files.len(), 6, "{aggregation_files:?}");

    for battery in ["motivators", "deterrents"] {
        let csv = std::fs::read_to_string(
            run_config.output.dir.join(format!("rankings_{battery}.csv")),
        )
        .unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 7, "{battery}: header + six attribute rows");
        let header: Vec<&str> = lines[0].split(',').collect();
        // attribute + 3 methods x 3 classes + 3 meta columns
        assert_eq!(header.len(), 1 + 9 + 3, "{battery}: {header:?}");
        assert!(header.contains(&"meta_class_3"));
        // every rank column holds a permutation of 1..=6
        for column in 1..header.len() {
            let mut ranks: Vec<usize> = lines[1..]
                .iter()
                .map(|line| line.split(',').nth(column).unwrap().parse().unwrap())
                .collect();
            ranks.sort_unstable();
            assert_eq!(ranks, vec![1, 2, 3, 4, 5, 6], "{battery} column {column}");
        }
        let md = std::fs::read_to_string(
            run_config.output.dir.join(format!("rankings_{battery}.md")),
        )
        .unwrap();
        assert!(md.contains("warnings:"), "markdown reports carry the footer");
    }

    // every declared artifact exists
    for path in report.artifact_paths() {
        assert!(path.exists(), "missing artifact {}", path.display());
    }

    // structured artifacts parse back through their loaders
    let model_text =
        std::fs::read_to_string(run_config.output.dir.join("lcca_model.toml")).unwrap();
    let model = segrank::lcca::LatentClassModel::from_toml_str(&model_text).unwrap();
    assert_eq!(model.k, 3);
    let schema = segrank::survey::SurveySchema::from_path(
        &config.output.dir.join("schema.toml"),
    )
    .unwrap();
    let (reloaded, load_report) =
        segrank::survey::load_dataset(&config.input.data, &schema).unwrap();
    assert_eq!(reloaded.len(), 840);
    assert!(load_report.row_errors.is_empty());
}

#[test]
fn lcca_precondition_failure_is_stage_tagged_and_preserves_artifacts() {
    let base = tempfile::tempdir().unwrap();
    let mut config = demo_config(base.path(), 840, 42);
    simulate_to_files(&config).unwrap();
    // 65 classes over 6 factors need n > 65 * 13 = 845 rows, so every
    // candidate count fails its identifiability precondition at n = 840
    config.lcca.k_min = 65;
    config.lcca.k_max = 65;
    config.output.dir = base.path().join("out");

    let err = run_pipeline(&config).unwrap_err();
    assert_eq!(err.stage, Stage::Lcca, "{err}");
    assert_eq!(err.stage.exit_code(), 16);

    // upstream artifacts survive the failure
    for name in ["cleaning_report.csv", "descriptives.csv", "adequacy.csv", "factor_solution.csv"] {
        assert!(
            config.output.dir.join(name).exists(),
            "{name} should have been written before the failure"
        );
    }
    // downstream artifacts were never produced
    assert!(!config.output.dir.join("rankings_motivators.csv").exists());
}

#[test]
fn rerun_with_same_seed_reproduces_the_run_report() {
    let base = tempfile::tempdir().unwrap();
    let config = demo_config(base.path(), 840, 11);
    simulate_to_files(&config).unwrap();

    let mut first = config.clone();
    first.output.dir = base.path().join("out_a");
    let mut second = config.clone();
    second.output.dir = base.path().join("out_b");

    let report_a = run_pipeline(&first).unwrap();
    let report_b = run_pipeline(&second).unwrap();
    assert_eq!(report_a.config_hash, report_b.config_hash);
    let bytes_a = std::fs::read(first.output.dir.join("run_report.toml")).unwrap();
    let bytes_b = std::fs::read(second.output.dir.join("run_report.toml")).unwrap();
    assert_eq!(bytes_a, bytes_b);
}

#[test]
fn staged_targets_stop_after_their_artifacts() {
    let base = tempfile::tempdir().unwrap();
    let config = demo_config(base.path(), 840, 42);
    simulate_to_files(&config).unwrap();

    let mut describe = config.clone();
    describe.output.dir = base.path().join("describe_out");
    run_pipeline_to(&describe, TargetStage::Describe).unwrap();
    assert!(describe.output.dir.join("descriptives.csv").exists());
    assert!(describe.output.dir.join("reliability.csv").exists());
    assert!(!describe.output.dir.join("adequacy.csv").exists());

    let mut efa = config.clone();
    efa.output.dir = base.path().join("efa_out");
    run_pipeline_to(&efa, TargetStage::Efa).unwrap();
    assert!(efa.output.dir.join("factor_solution.csv").exists());
    assert!(efa.output.dir.join("scree.svg").exists());
    assert!(!efa.output.dir.join("lcca_model.toml").exists());

    let mut mcdm = config.clone();
    mcdm.output.dir = base.path().join("mcdm_out");
    run_pipeline_to(&mcdm, TargetStage::Mcdm).unwrap();
    let csv =
        std::fs::read_to_string(mcdm.output.dir.join("rankings_motivators.csv")).unwrap();
    assert!(
        !csv.lines().next().unwrap().contains("meta"),
        "meta columns belong to the aggregation stage"
    );
}

#[test]
fn simulated_class_shares_match_the_preset() {
    let base = tempfile::tempdir().unwrap();
    let mut config = demo_config(base.path(), 10_000, 5);
    config.generator.write_truth = true;
    simulate_to_files(&config).unwrap();
    let truth =
        std::fs::read_to_string(config.output.dir.join("truth_classes.csv")).unwrap();
    let mut counts = [0usize; 3];
    for line in truth.lines().skip(1) {
        let class: usize = line.split(',').nth(1).unwrap().parse().unwrap();
        counts[class - 1] += 1;
    }
    for (count, target) in counts.iter().zip([48.0, 28.0, 24.0]) {
        let share = 100.0 * *count as f64 / 10_000.0;
        assert!((share - target).abs() < 1.5, "share {share:.2}% vs {target}%");
    }
}

#[test]
fn class_population_density_profile_recovers_generator_means() {
    let base = tempfile::tempdir().unwrap();
    let config = demo_config(base.path(), 2000, 42);
    simulate_to_files(&config).unwrap();
    let mut run_config = config.clone();
    run_config.output.dir = base.path().join("out");
    run_pipeline(&run_config).unwrap();

    let profiles =
        std::fs::read_to_string(run_config.output.dir.join("covariate_profiles.csv")).unwrap();
    let density_row = profiles
        .lines()
        .find(|line| line.starts_with("population_density"))
        .expect("density profiled");
    let cells: Vec<f64> = density_row
        .split(',')
        .skip(2)
        .take(3)
        .map(|cell| cell.parse().unwrap())
        .collect();
    // class labels are canonical (descending share), matching the preset
    // order; posterior blending tolerates a generous band
    for (got, want) in cells.iter().zip(segrank::demo::CLASS_POPULATION_DENSITY) {
        assert!(
            (got - want).abs() < 1200.0,
            "density {got:.0} vs generator mean {want:.0}"
        );
    }
}
