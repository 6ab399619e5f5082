//! Config-driven orchestration of the full analysis: clean, screen, factor,
//! cluster, rank, fuse, report. Identical config and seed give a
//! byte-identical output tree regardless of worker count.

mod config;

pub use config::{
    AggregationSection, ConstructionKind, EfaSection, GeneratorSection, InputSection,
    LccaSection, McdmSection, NFactors, OutputSection, PipelineConfig,
};

use crate::demo;
use crate::efa::{
    factor_scores, initial_variance_share, prune_items, suggest_n_factors, PafOptions,
};
use crate::lcca::{
    assign_classes, class_factor_means, profile_covariates, select_model, EmOptions,
};
use crate::mcdm::{
    build_decision_matrix, moora_rank, topsis_rank, vikor_rank, AttributeKind,
    MatrixConstruction, MethodResult,
};
use crate::psych::{adequacy_report, cronbach_alpha, pearson_correlation_matrix};
use crate::rankagg::{aggregate, AggregationPolicy, CeParams, RankingEnsemble};
use crate::report;
use crate::simulate::{simulate_survey_with_truth, GeneratorConfig};
use crate::survey::{clean_dataset, likert_distribution, load_dataset, SurveySchema};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fmt;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Load,
    Clean,
    Describe,
    Screen,
    Efa,
    Lcca,
    Mcdm,
    Aggregate,
    Report,
    Simulate,
}

impl Stage {
    pub fn name(&self) -> &'static str {
        match self {
            Stage::Config => "config",
            Stage::Load => "load",
            Stage::Clean => "clean",
            Stage::Describe => "describe",
            Stage::Screen => "screen",
            Stage::Efa => "efa",
            Stage::Lcca => "lcca",
            Stage::Mcdm => "mcdm",
            Stage::Aggregate => "aggregate",
            Stage::Report => "report",
            Stage::Simulate => "simulate",
        }
    }

    /// Stage-coded process exit code (0 is success).
    pub fn exit_code(&self) -> i32 {
        match self {
            Stage::Config => 10,
            Stage::Load => 11,
            Stage::Clean => 12,
            Stage::Describe => 13,
            Stage::Screen => 14,
            Stage::Efa => 15,
            Stage::Lcca => 16,
            Stage::Mcdm => 17,
            Stage::Aggregate => 18,
            Stage::Report => 19,
            Stage::Simulate => 20,
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A failure wrapped with the stage it happened in.
#[derive(Debug)]
pub struct PipelineError {
    pub stage: Stage,
    pub message: String,
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stage {}: {}", self.stage, self.message)
    }
}

impl std::error::Error for PipelineError {}

fn at<E: fmt::Display>(stage: Stage) -> impl Fn(E) -> PipelineError {
    move |err| PipelineError {
        stage,
        message: err.to_string(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StageReport {
    pub stage: String,
    pub status: String,
    pub artifacts: Vec<String>,
    pub warnings: Vec<String>,
}

/// What a run produced. Stage timings are kept in memory for logging but
/// excluded from the serialized report so output trees stay reproducible.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub config_hash: String,
    pub seed: u64,
    pub output_dir: std::path::PathBuf,
    pub stages: Vec<StageReport>,
    pub timings_ms: Vec<(String, u128)>,
}

impl RunReport {
    pub fn to_toml_string(&self) -> String {
        #[derive(Serialize)]
        struct View<'a> {
            config_hash: &'a str,
            seed: u64,
            stages: &'a [StageReport],
        }
        toml::to_string_pretty(&View {
            config_hash: &self.config_hash,
            seed: self.seed,
            stages: &self.stages,
        })
        .expect("run report serializes")
    }

    pub fn artifact_paths(&self) -> Vec<std::path::PathBuf> {
        self.stages
            .iter()
            .flat_map(|s| s.artifacts.iter())
            .map(|name| self.output_dir.join(name))
            .collect()
    }

    pub fn all_warnings(&self) -> Vec<String> {
        self.stages
            .iter()
            .flat_map(|s| s.warnings.iter().cloned())
            .collect()
    }
}

/// How far a run should go; CLI subcommands map onto these.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TargetStage {
    Describe,
    Screen,
    Efa,
    Lcca,
    Mcdm,
    Aggregate,
    Full,
}

struct Runner<'a> {
    config: &'a PipelineConfig,
    report: RunReport,
}

impl<'a> Runner<'a> {
    fn new(config: &'a PipelineConfig) -> Self {
        // hash the analysis-relevant config: where the artifacts land must
        // not change their bytes
        let mut normalized = config.clone();
        normalized.output.dir = std::path::PathBuf::from("out");
        let mut hasher = Sha256::new();
        hasher.update(normalized.canonical_toml().as_bytes());
        let config_hash = hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect::<String>();
        Runner {
            config,
            report: RunReport {
                config_hash,
                seed: config.seed,
                output_dir: config.output.dir.clone(),
                stages: Vec::new(),
                timings_ms: Vec::new(),
            },
        }
    }

    fn write(
        &mut self,
        stage: Stage,
        name: &str,
        content: &str,
    ) -> Result<(), PipelineError> {
        let path = self.config.output.dir.join(name);
        std::fs::write(&path, content).map_err(|e| PipelineError {
            stage,
            message: format!("cannot write {}: {e}", path.display()),
        })?;
        self.report
            .stages
            .last_mut()
            .expect("stage open")
            .artifacts
            .push(name.to_string());
        Ok(())
    }

    fn open_stage(&mut self, stage: Stage) -> Instant {
        self.report.stages.push(StageReport {
            stage: stage.name().to_string(),
            status: "completed".into(),
            artifacts: Vec::new(),
            warnings: Vec::new(),
        });
        Instant::now()
    }

    fn close_stage(&mut self, started: Instant) {
        let stage = self.report.stages.last().expect("stage open");
        self.report
            .timings_ms
            .push((stage.stage.clone(), started.elapsed().as_millis()));
    }

    fn warn(&mut self, message: String) {
        self.report
            .stages
            .last_mut()
            .expect("stage open")
            .warnings
            .push(message);
    }

    fn stage_warnings(&self) -> Vec<String> {
        self.report
            .stages
            .last()
            .map(|s| s.warnings.clone())
            .unwrap_or_default()
    }
}

/// Resolve the schema from the config (file or built-in preset).
pub fn load_schema(config: &PipelineConfig) -> Result<SurveySchema, PipelineError> {
    match (&config.input.schema, &config.input.schema_preset) {
        (Some(path), _) => SurveySchema::from_path(path).map_err(at(Stage::Config)),
        (None, Some(preset)) if preset == "rhs-demo" => Ok(demo::schema()),
        _ => Err(PipelineError {
            stage: Stage::Config,
            message: "no schema configured".into(),
        }),
    }
}

/// Run the full pipeline.
pub fn run_pipeline(config: &PipelineConfig) -> Result<RunReport, PipelineError> {
    run_pipeline_to(config, TargetStage::Full)
}

/// Run the pipeline through `target`, writing each completed stage's
/// artifacts under the configured output directory.
pub fn run_pipeline_to(
    config: &PipelineConfig,
    target: TargetStage,
) -> Result<RunReport, PipelineError> {
    config.validate().map_err(at(Stage::Config))?;
    std::fs::create_dir_all(&config.output.dir).map_err(at(Stage::Config))?;
    let schema = load_schema(config)?;
    let mut runner = Runner::new(config);

    // load
    let started = runner.open_stage(Stage::Load);
    let (raw, load_report) =
        load_dataset(&config.input.data, &schema).map_err(at(Stage::Load))?;
    {
        let mut csv = String::from("row,column,message\n");
        for err in &load_report.row_errors {
            csv.push_str(&format!(
                "{},{},{}\n",
                err.row,
                err.column.clone().unwrap_or_default(),
                err.message.replace(',', ";")
            ));
        }
        runner.write(Stage::Load, "load_errors.csv", &csv)?;
    }
    if !load_report.row_errors.is_empty() {
        runner.warn(format!(
            "{} of {} rows rejected at load",
            load_report.row_errors.len(),
            load_report.rows_read
        ));
    }
    runner.close_stage(started);

    // clean
    let started = runner.open_stage(Stage::Clean);
    let (ds, cleaning) =
        clean_dataset(&raw, &schema.rules).map_err(at(Stage::Clean))?;
    {
        let mut buffer = Vec::new();
        cleaning.to_csv(&mut buffer).map_err(at(Stage::Clean))?;
        let text = String::from_utf8(buffer).expect("csv is utf-8");
        runner.write(Stage::Clean, "cleaning_report.csv", &text)?;
    }
    if !cleaning.dropped.is_empty() {
        runner.warn(format!(
            "{} of {} records dropped during cleaning",
            cleaning.dropped.len(),
            cleaning.input_records
        ));
    }
    runner.close_stage(started);

    // describe
    let started = runner.open_stage(Stage::Describe);
    {
        let mut rows = Vec::new();
        for code in ds.schema.required_items() {
            rows.push(likert_distribution(&ds, &code).map_err(at(Stage::Describe))?);
        }
        runner.write(Stage::Describe, "descriptives.csv", &report::descriptives_csv(&rows))?;
        let mut alphas = Vec::new();
        for scale in ds.schema.scales.iter().filter(|s| !s.attribute_set) {
            let alpha = cronbach_alpha(&ds, scale).map_err(at(Stage::Describe))?;
            if alpha.below_threshold {
                runner.warn(format!(
                    "scale {} alpha {:.3} below 0.70",
                    alpha.scale_id, alpha.raw
                ));
            }
            alphas.push(alpha);
        }
        runner.write(Stage::Describe, "reliability.csv", &report::reliability_csv(&alphas))?;
        let md = format!(
            "{}{}",
            report::descriptives_markdown(&rows),
            report::warnings_footer(&runner.stage_warnings())
        );
        runner.write(Stage::Describe, "descriptives.md", &md)?;
    }
    runner.close_stage(started);
    if target == TargetStage::Describe {
        return finish(runner, config);
    }

    // screen
    let analysis_items = ds.schema.analysis_items();
    let started = runner.open_stage(Stage::Screen);
    let corr =
        pearson_correlation_matrix(&ds, &analysis_items).map_err(at(Stage::Screen))?;
    let adequacy = adequacy_report(&corr).map_err(at(Stage::Screen))?;
    if !adequacy.kmo.adequate {
        runner.warn(format!(
            "overall KMO {:.3} below the adequacy threshold",
            adequacy.kmo.overall
        ));
    }
    if adequacy.bartlett.p_value >= 0.001 {
        runner.warn(format!(
            "Bartlett sphericity p = {:.3e} is not below 0.001",
            adequacy.bartlett.p_value
        ));
    }
    runner.write(Stage::Screen, "adequacy.csv", &report::adequacy_csv(&adequacy))?;
    let md = format!(
        "{}{}",
        report::adequacy_markdown(&adequacy),
        report::warnings_footer(&runner.stage_warnings())
    );
    runner.write(Stage::Screen, "adequacy.md", &md)?;
    runner.close_stage(started);
    if target == TargetStage::Screen {
        return finish(runner, config);
    }

    // efa
    let started = runner.open_stage(Stage::Efa);
    let initial_eigenvalues = crate::linalg::eigenvalues_desc(&corr.values);
    let suggestion = suggest_n_factors(&initial_eigenvalues).map_err(at(Stage::Efa))?;
    if suggestion.weak_elbow {
        runner.warn("scree elbow is weak (near-geometric eigenvalue decay)".into());
    }
    let m = match config.efa.n_factors {
        NFactors::Fixed(m) => m,
        NFactors::Auto => suggestion.n_factors,
    };
    runner.write(Stage::Efa, "scree.csv", &report::scree_csv(&initial_eigenvalues))?;
    runner.write(
        Stage::Efa,
        "scree.svg",
        &report::scree_svg(&initial_eigenvalues, suggestion.n_factors),
    )?;
    let paf_options = PafOptions {
        tol: config.efa.paf_tol,
        max_iter: config.efa.paf_max_iter,
    };
    let (_retained, solution, trace) = prune_items(
        &ds,
        &analysis_items,
        m,
        config.efa.loading_threshold,
        &paf_options,
        config.efa.promax_kappa,
    )
    .map_err(at(Stage::Efa))?;
    for warning in &solution.warnings {
        runner.warn(warning.clone());
    }
    {
        let mut csv = String::from("deleted_item,max_abs_loading\n");
        for (code, loading) in &trace.deleted {
            csv.push_str(&format!("{code},{loading:.4}\n"));
        }
        runner.write(Stage::Efa, "prune_log.csv", &csv)?;
    }
    runner.write(
        Stage::Efa,
        "factor_solution.csv",
        &report::factor_solution_csv(&solution),
    )?;
    let md = format!(
        "{}{}",
        report::factor_solution_markdown(&solution, config.efa.loading_threshold),
        report::warnings_footer(&runner.stage_warnings())
    );
    runner.write(Stage::Efa, "factor_solution.md", &md)?;
    let scores = factor_scores(&ds, &solution).map_err(at(Stage::Efa))?;
    runner.write(Stage::Efa, "factor_scores.csv", &report::factor_scores_csv(&scores))?;
    let _ = initial_variance_share(&solution);
    runner.close_stage(started);
    if target == TargetStage::Efa {
        return finish(runner, config);
    }

    // lcca
    let started = runner.open_stage(Stage::Lcca);
    let em_options = EmOptions {
        restarts: config.lcca.restarts,
        seed: config.seed,
        tol: config.lcca.tol,
        max_iter: config.lcca.max_iter,
    };
    let selected = select_model(
        &scores,
        config.lcca.k_min..=config.lcca.k_max,
        config.lcca.criterion,
        &em_options,
    )
    .map_err(at(Stage::Lcca))?;
    for row in selected.comparison.iter().filter(|r| r.error.is_some()) {
        runner.warn(format!(
            "k = {} not fitted: {}",
            row.k,
            row.error.clone().unwrap_or_default()
        ));
    }
    runner.write(Stage::Lcca, "lcca_model.toml", &selected.model.to_toml_string())?;
    runner.write(
        Stage::Lcca,
        "model_comparison.csv",
        &report::model_comparison_csv(&selected.comparison),
    )?;
    let assignment = assign_classes(&selected.posterior);
    if !assignment.ties.is_empty() {
        runner.warn(format!(
            "{} respondents had tied posteriors (assigned to the lower class)",
            assignment.ties.len()
        ));
    }
    {
        let mut csv = String::from("respondent_id,class,max_posterior\n");
        for (i, id) in selected.posterior.respondent_ids.iter().enumerate() {
            let class = assignment.classes[i];
            csv.push_str(&format!(
                "{id},{},{:.6}\n",
                class + 1,
                selected.posterior.responsibilities[(i, class)]
            ));
        }
        runner.write(Stage::Lcca, "assignments.csv", &csv)?;
    }
    let factor_names: Vec<String> = (1..=scores.factor_count).map(|j| format!("f{j}")).collect();
    let means = class_factor_means(&selected.posterior, &scores).map_err(at(Stage::Lcca))?;
    runner.write(Stage::Lcca, "class_means.csv", &report::class_means_csv(&means, &factor_names))?;
    let md = format!(
        "{}{}",
        report::class_means_markdown(&means, &factor_names),
        report::warnings_footer(&runner.stage_warnings())
    );
    runner.write(Stage::Lcca, "class_means.md", &md)?;
    let covariate_codes: Vec<String> =
        ds.schema.covariates.iter().map(|c| c.code.clone()).collect();
    let profiles = profile_covariates(&selected.posterior, &ds, &covariate_codes)
        .map_err(at(Stage::Lcca))?;
    let k = selected.model.k;
    runner.write(
        Stage::Lcca,
        "covariate_profiles.csv",
        &report::covariate_profiles_csv(&profiles, k),
    )?;
    let md = format!(
        "{}{}",
        report::covariate_profiles_markdown(&profiles, k),
        report::warnings_footer(&runner.stage_warnings())
    );
    runner.write(Stage::Lcca, "covariate_profiles.md", &md)?;
    runner.close_stage(started);
    if target == TargetStage::Lcca {
        return finish(runner, config);
    }

    // mcdm: one decision problem per (battery, class)
    let started = runner.open_stage(Stage::Mcdm);
    let construction = match config.mcdm.construction {
        ConstructionKind::LevelShares => MatrixConstruction::LevelShares {
            benefit_levels: config.mcdm.benefit_levels.clone(),
            cost_levels: config.mcdm.cost_levels.clone(),
        },
        ConstructionKind::MeanImportance => MatrixConstruction::MeanImportance,
    };
    let batteries: Vec<crate::survey::Scale> = ds
        .schema
        .scales
        .iter()
        .filter(|s| s.attribute_set)
        .cloned()
        .collect();
    let members_per_class: Vec<Vec<usize>> = (0..k)
        .map(|c| {
            (0..ds.len())
                .filter(|&i| assignment.classes[i] == c)
                .collect()
        })
        .collect();

    // method_results[battery][class] = [moora, topsis, vikor]
    let mut method_results: Vec<Vec<[MethodResult; 3]>> = Vec::new();
    for battery in &batteries {
        let kind = if battery.id.contains("deterrent") {
            AttributeKind::Deterrent
        } else {
            AttributeKind::Motivator
        };
        let mut per_class = Vec::new();
        for members in &members_per_class {
            let (dm, warnings) =
                build_decision_matrix(&ds, members, &battery.items, kind, &construction)
                    .map_err(at(Stage::Mcdm))?;
            for warning in warnings {
                runner.warn(format!("{}: {warning}", battery.id));
            }
            let moora = moora_rank(&dm).map_err(at(Stage::Mcdm))?;
            let topsis = topsis_rank(&dm).map_err(at(Stage::Mcdm))?;
            let vikor = vikor_rank(&dm, config.mcdm.vikor_v).map_err(at(Stage::Mcdm))?;
            per_class.push([moora, topsis, vikor]);
        }
        method_results.push(per_class);
    }
    runner.close_stage(started);
    if target == TargetStage::Mcdm {
        // method-only tables (the meta column belongs to the next stage)
        let started = runner.open_stage(Stage::Report);
        for (battery, per_class) in batteries.iter().zip(&method_results) {
            let table = ranking_table(battery, per_class, Vec::new());
            runner.write(
                Stage::Report,
                &format!("rankings_{}.csv", battery.id),
                &report::rankings_csv(&table),
            )?;
        }
        runner.close_stage(started);
        return finish(runner, config);
    }

    // aggregate
    let started = runner.open_stage(Stage::Aggregate);
    let policy = AggregationPolicy {
        metric: config.aggregation.metric,
        brute_force_limit: config.aggregation.brute_force_limit,
        cross_entropy: CeParams {
            seed: config.seed,
            samples: config.aggregation.ce_samples,
            rho: config.aggregation.ce_rho,
            max_stagnation: config.aggregation.ce_max_stagnation,
            ..Default::default()
        },
    };
    let mut metas: Vec<Vec<Vec<usize>>> = Vec::new();
    for (battery, per_class) in batteries.iter().zip(&method_results) {
        let mut battery_metas = Vec::new();
        for (class_idx, methods) in per_class.iter().enumerate() {
            let ensemble = RankingEnsemble::new(
                battery.items.clone(),
                methods
                    .iter()
                    .map(|m| m.ranks.total_order.clone())
                    .collect(),
            )
            .map_err(at(Stage::Aggregate))?;
            let fused = aggregate(&ensemble, &policy).map_err(at(Stage::Aggregate))?;
            runner.write(
                Stage::Aggregate,
                &format!("aggregation_{}_class{}.toml", battery.id, class_idx + 1),
                &report::aggregation_toml(&fused),
            )?;
            battery_metas.push(fused.meta);
        }
        metas.push(battery_metas);
    }
    runner.close_stage(started);

    // report
    let started = runner.open_stage(Stage::Report);
    for ((battery, per_class), battery_metas) in
        batteries.iter().zip(&method_results).zip(&metas)
    {
        let table = ranking_table(battery, per_class, battery_metas.clone());
        runner.write(
            Stage::Report,
            &format!("rankings_{}.csv", battery.id),
            &report::rankings_csv(&table),
        )?;
        let md = format!(
            "{}{}",
            report::rankings_markdown(&table),
            report::warnings_footer(&runner.report.all_warnings())
        );
        runner.write(Stage::Report, &format!("rankings_{}.md", battery.id), &md)?;
    }
    runner.close_stage(started);

    finish(runner, config)
}

fn ranking_table(
    battery: &crate::survey::Scale,
    per_class: &[[MethodResult; 3]],
    metas: Vec<Vec<usize>>,
) -> report::RankingTable {
    report::RankingTable {
        battery: battery.id.clone(),
        labels: battery.items.clone(),
        method_names: vec!["MOORA".into(), "TOPSIS".into(), "VIKOR".into()],
        method_ranks: (0..3)
            .map(|method| {
                per_class
                    .iter()
                    .map(|methods| methods[method].ranks.clone())
                    .collect()
            })
            .collect(),
        meta: metas,
    }
}

fn finish(mut runner: Runner, config: &PipelineConfig) -> Result<RunReport, PipelineError> {
    let started = runner.open_stage(Stage::Report);
    let text = runner.report.to_toml_string();
    // include run_report.toml itself in the artifact list before writing
    runner
        .report
        .stages
        .last_mut()
        .expect("stage open")
        .artifacts
        .push("run_report.toml".into());
    let path = config.output.dir.join("run_report.toml");
    let _ = text; // the serialized form must include the final artifact entry
    let final_text = runner.report.to_toml_string();
    std::fs::write(&path, final_text).map_err(|e| PipelineError {
        stage: Stage::Report,
        message: format!("cannot write {}: {e}", path.display()),
    })?;
    runner.close_stage(started);
    Ok(runner.report)
}

/// Validation summary for the `validate` subcommand: no artifacts, just the
/// checked facts.
#[derive(Debug)]
pub struct ValidationSummary {
    pub schema_name: String,
    pub items: usize,
    pub covariates: usize,
    pub rows_read: usize,
    pub rows_loaded: usize,
    pub row_errors: usize,
}

pub fn validate_inputs(config: &PipelineConfig) -> Result<ValidationSummary, PipelineError> {
    config.validate().map_err(at(Stage::Config))?;
    let schema = load_schema(config)?;
    let (ds, load_report) =
        load_dataset(&config.input.data, &schema).map_err(at(Stage::Load))?;
    Ok(ValidationSummary {
        schema_name: schema.name.clone(),
        items: schema.item_codes().len(),
        covariates: schema.covariates.len(),
        rows_read: load_report.rows_read,
        rows_loaded: ds.len(),
        row_errors: load_report.row_errors.len(),
    })
}

/// Resolve the generator from the config: inline spec or built-in preset,
/// with n/seed overrides (seed falls back to the master seed).
pub fn resolve_generator(config: &PipelineConfig) -> Result<GeneratorConfig, PipelineError> {
    let section = &config.generator;
    let mut generator = match (&section.spec, section.preset.as_deref()) {
        (Some(spec), _) => spec.clone(),
        (None, Some("rhs-demo")) | (None, None) => {
            demo::generator_config(section.n.unwrap_or(2000), 0)
        }
        (None, Some(other)) => {
            return Err(PipelineError {
                stage: Stage::Config,
                message: format!("unknown generator preset {other:?}"),
            })
        }
    };
    if let Some(n) = section.n {
        generator.n = n;
    }
    generator.seed = section.seed.unwrap_or(config.seed);
    generator.validate().map_err(at(Stage::Config))?;
    Ok(generator)
}

/// Generate a synthetic survey and write it (plus its schema and a summary)
/// under the output directory.
pub fn simulate_to_files(config: &PipelineConfig) -> Result<RunReport, PipelineError> {
    config.validate().map_err(at(Stage::Config))?;
    std::fs::create_dir_all(&config.output.dir).map_err(at(Stage::Config))?;
    // the schema file may be one of this run's own outputs; fall back to the
    // preset schema when it does not exist yet
    let schema = match &config.input.schema {
        Some(path) if path.exists() => SurveySchema::from_path(path).map_err(at(Stage::Config))?,
        _ => match config.input.schema_preset.as_deref() {
            Some("rhs-demo") | None => demo::schema(),
            Some(other) => {
                return Err(PipelineError {
                    stage: Stage::Config,
                    message: format!("unknown schema preset {other:?}"),
                })
            }
        },
    };
    let generator = resolve_generator(config)?;
    let mut runner = Runner::new(config);
    let started = runner.open_stage(Stage::Simulate);

    let (ds, truth) =
        simulate_survey_with_truth(&generator, &schema).map_err(at(Stage::Simulate))?;
    {
        let mut buffer = Vec::new();
        ds.to_csv(&mut buffer).map_err(at(Stage::Simulate))?;
        let text = String::from_utf8(buffer).expect("csv is utf-8");
        runner.write(Stage::Simulate, "survey.csv", &text)?;
    }
    runner.write(Stage::Simulate, "schema.toml", &schema.to_toml())?;
    {
        #[derive(Serialize)]
        struct Summary {
            n: usize,
            seed: u64,
            classes: usize,
            factors: usize,
        }
        let summary = toml::to_string_pretty(&Summary {
            n: generator.n,
            seed: generator.seed,
            classes: generator.classes.len(),
            factors: generator.n_factors(),
        })
        .expect("summary serializes");
        runner.write(Stage::Simulate, "generator_summary.toml", &summary)?;
    }
    if config.generator.write_truth {
        let mut csv = String::from("respondent_id,class\n");
        for (record, &class) in ds.records.iter().zip(&truth.class_labels) {
            csv.push_str(&format!("{},{}\n", record.respondent_id, class + 1));
        }
        runner.write(Stage::Simulate, "truth_classes.csv", &csv)?;
    }
    runner.close_stage(started);
    finish(runner, config)
}
