//! Pipeline configuration: one TOML file with per-stage sections. Every
//! tunable that the analysis depends on (thresholds, rotation power,
//! restarts, VIKOR weight, aggregation metric) lives here with its default.

use crate::lcca::SelectionCriterion;
use crate::rankagg::Metric;
use crate::simulate::GeneratorConfig;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::path::{Path, PathBuf};

/// Factor-count choice: a fixed number or the scree suggestion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NFactors {
    #[default]
    Auto,
    Fixed(usize),
}

impl Serialize for NFactors {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            NFactors::Auto => serializer.serialize_str("auto"),
            NFactors::Fixed(n) => serializer.serialize_u64(*n as u64),
        }
    }
}

impl<'de> Deserialize<'de> for NFactors {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Count(usize),
            Mode(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Count(n) if n >= 1 => Ok(NFactors::Fixed(n)),
            Repr::Count(_) => Err(serde::de::Error::custom("n_factors must be at least 1")),
            Repr::Mode(s) if s == "auto" => Ok(NFactors::Auto),
            Repr::Mode(s) => Err(serde::de::Error::custom(format!(
                "n_factors must be an integer or \"auto\", got {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSection {
    pub data: PathBuf,
    /// Schema file path, or omit and set `schema_preset = "rhs-demo"`.
    #[serde(default)]
    pub schema: Option<PathBuf>,
    #[serde(default)]
    pub schema_preset: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EfaSection {
    pub n_factors: NFactors,
    /// Items whose strongest pattern loading stays below this are pruned.
    pub loading_threshold: f64,
    pub promax_kappa: f64,
    pub paf_tol: f64,
    pub paf_max_iter: usize,
}

impl Default for EfaSection {
    fn default() -> Self {
        Self {
            n_factors: NFactors::Auto,
            loading_threshold: 0.50,
            promax_kappa: 4.0,
            paf_tol: 1e-3,
            paf_max_iter: 300,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LccaSection {
    pub k_min: usize,
    pub k_max: usize,
    pub restarts: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub criterion: SelectionCriterion,
}

impl Default for LccaSection {
    fn default() -> Self {
        Self {
            k_min: 1,
            k_max: 6,
            restarts: 20,
            tol: 1e-7,
            max_iter: 500,
            criterion: SelectionCriterion::Bic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstructionKind {
    LevelShares,
    MeanImportance,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McdmSection {
    pub construction: ConstructionKind,
    pub benefit_levels: Vec<u8>,
    pub cost_levels: Vec<u8>,
    pub vikor_v: f64,
}

impl Default for McdmSection {
    fn default() -> Self {
        Self {
            construction: ConstructionKind::LevelShares,
            benefit_levels: vec![5, 6, 7],
            cost_levels: vec![1, 2, 3],
            vikor_v: 0.5,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AggregationSection {
    pub metric: Metric,
    /// Inclusive bound for the exhaustive path.
    pub brute_force_limit: usize,
    /// 0 means the size-derived default.
    pub ce_samples: usize,
    pub ce_rho: f64,
    pub ce_max_stagnation: usize,
}

impl Default for AggregationSection {
    fn default() -> Self {
        Self {
            metric: Metric::Footrule,
            brute_force_limit: 8,
            ce_samples: 0,
            ce_rho: 0.1,
            ce_max_stagnation: 15,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorSection {
    /// Built-in preset name ("rhs-demo"), or provide `spec` inline.
    pub preset: Option<String>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    /// Also write the generating classes and factor draws.
    pub write_truth: bool,
    pub spec: Option<GeneratorConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    /// Master seed: drives the clustering restarts and, unless overridden,
    /// the generator.
    #[serde(default)]
    pub seed: u64,
    pub input: InputSection,
    pub output: OutputSection,
    #[serde(default)]
    pub efa: EfaSection,
    #[serde(default)]
    pub lcca: LccaSection,
    #[serde(default)]
    pub mcdm: McdmSection,
    #[serde(default)]
    pub aggregation: AggregationSection,
    #[serde(default)]
    pub generator: GeneratorSection,
}

impl PipelineConfig {
    pub fn from_path(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let mut config: PipelineConfig =
            toml::from_str(&text).map_err(|e| format!("config parse error: {e}"))?;
        // relative paths resolve against the config file location
        if let Some(base) = path.parent() {
            config.input.data = resolve(base, &config.input.data);
            if let Some(schema) = &config.input.schema {
                config.input.schema = Some(resolve(base, schema));
            }
            config.output.dir = resolve(base, &config.output.dir);
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.input.schema.is_none() && self.input.schema_preset.is_none() {
            return Err("input needs either schema or schema_preset".into());
        }
        if let Some(preset) = &self.input.schema_preset {
            if preset != "rhs-demo" {
                return Err(format!("unknown schema preset {preset:?}"));
            }
        }
        if !(self.efa.loading_threshold > 0.0 && self.efa.loading_threshold < 1.0) {
            return Err("efa.loading_threshold must lie in (0, 1)".into());
        }
        if self.efa.promax_kappa < 1.0 {
            return Err("efa.promax_kappa must be at least 1".into());
        }
        if self.lcca.k_min == 0 || self.lcca.k_min > self.lcca.k_max {
            return Err("lcca class range must satisfy 1 <= k_min <= k_max".into());
        }
        if self.lcca.restarts == 0 {
            return Err("lcca.restarts must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.mcdm.vikor_v) {
            return Err("mcdm.vikor_v must lie in [0, 1]".into());
        }
        if self.mcdm.construction == ConstructionKind::LevelShares {
            let valid = |levels: &[u8]| levels.iter().all(|&l| (1..=7).contains(&l));
            if self.mcdm.benefit_levels.is_empty()
                || self.mcdm.cost_levels.is_empty()
                || !valid(&self.mcdm.benefit_levels)
                || !valid(&self.mcdm.cost_levels)
            {
                return Err("mcdm level lists must be non-empty subsets of 1..=7".into());
            }
        }
        if !(0.0 < self.aggregation.ce_rho && self.aggregation.ce_rho <= 1.0) {
            return Err("aggregation.ce_rho must lie in (0, 1]".into());
        }
        if let Some(preset) = &self.generator.preset {
            if preset != "rhs-demo" {
                return Err(format!("unknown generator preset {preset:?}"));
            }
        }
        Ok(())
    }

    /// Canonical serialized form used for the reproducibility hash.
    pub fn canonical_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

fn resolve(base: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}
