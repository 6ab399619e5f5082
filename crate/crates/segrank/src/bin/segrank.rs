//! Batch CLI over the segrank pipeline. One subcommand per stage; each runs
//! the pipeline far enough to produce that stage's artifacts. Exit code 0 on
//! success, otherwise a stage-specific code (10 config, 11 load, 12 clean,
//! 13 describe, 14 screen, 15 efa, 16 lcca, 17 mcdm, 18 aggregate,
//! 19 report, 20 simulate).

use clap::{Args, Parser, Subcommand};
use segrank::pipeline::{
    run_pipeline_to, simulate_to_files, validate_inputs, PipelineConfig, RunReport, TargetStage,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "segrank",
    version,
    about = "Likert survey segmentation and attribute-ranking pipeline",
    long_about = "Step-wise survey analytics: cleaning and descriptives, reliability and \
sampling-adequacy screening, principal-axis factor analysis with promax rotation, \
latent-class clustering over factor scores, per-class MOORA/TOPSIS/VIKOR attribute \
ranking, and meta-rank fusion.\n\nSample-size note: `required_sample_size` floors the \
Cochran formula (1.96, 0.5, 0.05 -> 384)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Pipeline configuration file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Override the master seed from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the output directory from the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the config, schema and data header without writing artifacts.
    Validate(CommonArgs),
    /// Load, clean and describe: distributions, weighted means, reliability.
    Describe(CommonArgs),
    /// Run through factor extraction, rotation and pruning.
    Efa(CommonArgs),
    /// Run through latent-class selection and covariate profiling.
    Lcca(CommonArgs),
    /// Run through per-class MOORA/TOPSIS/VIKOR ranking.
    Mcdm(CommonArgs),
    /// Run through meta-rank fusion.
    Aggregate(CommonArgs),
    /// Full pipeline including all reports.
    Pipeline(CommonArgs),
    /// Generate a synthetic survey from the configured generator.
    Simulate(CommonArgs),
}

fn load_config(args: &CommonArgs) -> Result<PipelineConfig, String> {
    let mut config = PipelineConfig::from_path(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(out) = &args.out {
        config.output.dir = out.clone();
    }
    Ok(config)
}

fn summarize(report: &RunReport) {
    for (stage, ms) in &report.timings_ms {
        eprintln!("  {stage}: {ms} ms");
    }
    for warning in report.all_warnings() {
        eprintln!("warning: {warning}");
    }
    println!(
        "wrote {} artifacts to {}",
        report.artifact_paths().len(),
        report.output_dir.display()
    );
    println!("config hash: {}", report.config_hash);
}

fn run(target: TargetStage, args: &CommonArgs) -> ExitCode {
    let config = match load_config(args) {
        Ok(config) => config,
        Err(message) => {
            eprintln!("error: {message}");
            return ExitCode::from(10);
        }
    };
    match run_pipeline_to(&config, target) {
        Ok(report) => {
            summarize(&report);
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.stage.exit_code() as u8)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Validate(args) => {
            let config = match load_config(args) {
                Ok(config) => config,
                Err(message) => {
                    eprintln!("error: {message}");
                    return ExitCode::from(10);
                }
            };
            match validate_inputs(&config) {
                Ok(summary) => {
                    println!(
                        "schema: {} ({} items, {} covariates)",
                        summary.schema_name, summary.items, summary.covariates
                    );
                    println!(
                        "data: {} rows read, {} loadable, {} rejected",
                        summary.rows_read, summary.rows_loaded, summary.row_errors
                    );
                    ExitCode::SUCCESS
                }
                Err(err) => {
                    eprintln!("error: {err}");
                    ExitCode::from(err.stage.exit_code() as u8)
                }
            }
        }
        Command::Describe(args) => run(TargetStage::Describe, args),
        Command::Efa(args) => run(TargetStage::Efa, args),
        Command::Lcca(args) => run(TargetStage::Lcca, args),
        Command::Mcdm(args) => run(TargetStage::Mcdm, args),
        Command::Aggregate(args) => run(TargetStage::Aggregate, args),
        Command::Pipeline(args) => run(TargetStage::Full, args),
        Command::Simulate(args) => {
            let config = match load_config(args) {
                Ok(config) => config,
                Err(message) => {
                    eprintln!("error: {message}");
                    return ExitCode::from(10);
                }
            };
            match simulate_to_files(&config) {
                Ok(report) => {
                    summarize(&report);
                    ExitCode::SUCCESS
                }
                Err(err) => {
                    eprintln!("error: {err}");
                    ExitCode::from(err.stage.exit_code() as u8)
                }
            }
        }
    }
}
