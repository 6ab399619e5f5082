//! Binary integration: subcommand flow, flag overrides, stage-coded exits.

use std::path::Path;
use std::process::Command;

fn segrank() -> Command {
    Command::new(env!("CARGO_BIN_EXE_segrank"))
}

fn write_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("config.toml");
    std::fs::write(
        &path,
        r#"
seed = 42

[input]
data = "data/survey.csv"
schema = "data/schema.toml"

[output]
dir = "out"

[efa]
n_factors = 6

[lcca]
k_min = 1
k_max = 3
restarts = 8

[generator]
preset = "rhs-demo"
n = 840
"#,
    )
    .unwrap();
    path
}

#[test]
fn simulate_validate_pipeline_flow() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());

    let out = segrank()
        .args(["simulate", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.path().join("data"))
        .output()
        .unwrap();
    assert!(out.status.success(), "simulate: {}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("data/survey.csv").exists());
    assert!(dir.path().join("data/schema.toml").exists());

    let out = segrank()
        .args(["validate", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert!(out.status.success(), "validate: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("840 rows read"), "{stdout}");
    assert!(stdout.contains("0 rejected"), "{stdout}");

    let out = segrank()
        .args(["describe", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("out/descriptives.md").exists());

    let out = segrank()
        .args(["pipeline", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert!(out.status.success(), "pipeline: {}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("out/rankings_deterrents.md").exists());
    assert!(dir.path().join("out/run_report.toml").exists());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("config hash:"), "{stdout}");
}

#[test]
fn out_flag_overrides_the_configured_directory() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    segrank()
        .args(["simulate", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(dir.path().join("data"))
        .status()
        .unwrap();
    let alt = dir.path().join("elsewhere");
    let out = segrank()
        .args(["describe", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&alt)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(alt.join("descriptives.csv").exists());
    assert!(!dir.path().join("out").exists());
}

#[test]
fn missing_config_exits_with_config_code() {
    let out = segrank()
        .args(["pipeline", "--config", "/nonexistent/config.toml"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(10));
}

#[test]
fn lcca_failure_exits_with_stage_code() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("config.toml");
    std::fs::write(
        &config_path,
        r#"
seed = 42

[input]
data = "data/survey.csv"
schema_preset = "rhs-demo"

[output]
dir = "out"

[efa]
n_factors = 6

# 65 classes over 6 factors need more rows than n = 840 provides
[lcca]
k_min = 65
k_max = 65
restarts = 4

[generator]
preset = "rhs-demo"
n = 840
"#,
    )
    .unwrap();
    segrank()
        .args(["simulate", "--config"])
        .arg(&config_path)
        .arg("--out")
        .arg(dir.path().join("data"))
        .status()
        .unwrap();
    let out = segrank()
        .args(["pipeline", "--config"])
        .arg(&config_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(16), "{}", String::from_utf8_lossy(&out.stderr));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("stage lcca"), "{stderr}");
}
