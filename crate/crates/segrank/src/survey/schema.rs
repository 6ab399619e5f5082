//! Schema declaration: items, scales, covariates and consistency rules.
//!
//! Schemas are declared in a TOML file so that the item→scale mapping, the
//! covariate typing and the cleaning rules travel with the data rather than
//! being hard-coded.

use super::SurveyError;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::path::Path;

/// One measured statement (indicator or attribute-importance item).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IndicatorItem {
    pub code: String,
    #[serde(default)]
    pub prompt: String,
    /// Owning scale (latent construct) or attribute set.
    pub scale: String,
}

/// A named set of items measuring one latent construct or attribute battery.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scale {
    pub id: String,
    #[serde(default)]
    pub name: String,
    pub items: Vec<String>,
    /// Scales marked as attribute batteries feed the decision-matrix stage
    /// instead of the factor analysis.
    #[serde(default)]
    pub attribute_set: bool,
}

/// Covariate typing. Covariates are always passive: they never enter the
/// clustering model, only the posterior profiles.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CovariateKind {
    Categorical { levels: Vec<String> },
    Continuous { units: String },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CovariateSpec {
    pub code: String,
    #[serde(flatten)]
    pub kind: CovariateKind,
}

/// Declarative cross-question consistency predicates applied at cleaning
/// time. The default rule set is empty.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConsistencyRule {
    /// Flags respondents who give the same answer to every listed item.
    StraightLine { name: String, items: Vec<String> },
    /// Flags respondents whose answers to two related items differ by more
    /// than `max_gap` points.
    MaxGap {
        name: String,
        item_a: String,
        item_b: String,
        max_gap: u8,
    },
}

impl ConsistencyRule {
    pub fn name(&self) -> &str {
        match self {
            ConsistencyRule::StraightLine { name, .. } => name,
            ConsistencyRule::MaxGap { name, .. } => name,
        }
    }

    /// True when the record violates the rule.
    pub fn violated(&self, record: &super::SurveyRecord) -> bool {
        match self {
            ConsistencyRule::StraightLine { items, .. } => {
                let mut values = items.iter().map(|c| record.response(c));
                match values.next().flatten() {
                    Some(first) => {
                        items.len() >= 2
                            && items
                                .iter()
                                .all(|c| record.response(c).is_some_and(|v| v == first))
                    }
                    None => false,
                }
            }
            ConsistencyRule::MaxGap {
                item_a,
                item_b,
                max_gap,
                ..
            } => match (record.response(item_a), record.response(item_b)) {
                (Some(a), Some(b)) => a.get().abs_diff(b.get()) > *max_gap,
                _ => false,
            },
        }
    }
}

/// Full schema: items grouped into scales, covariate typing, cleaning rules.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurveySchema {
    pub name: String,
    #[serde(rename = "item", default)]
    pub items: Vec<IndicatorItem>,
    #[serde(rename = "scale", default)]
    pub scales: Vec<Scale>,
    #[serde(rename = "covariate", default)]
    pub covariates: Vec<CovariateSpec>,
    #[serde(rename = "rule", default)]
    pub rules: Vec<ConsistencyRule>,
    #[serde(skip)]
    item_order: Vec<String>,
}

impl SurveySchema {
    pub fn from_path(path: &Path) -> Result<Self, SurveyError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self, SurveyError> {
        let mut schema: SurveySchema = toml::from_str(text)?;
        schema.finish()?;
        Ok(schema)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("schema serializes")
    }

    /// Build a schema programmatically; validates the same invariants as the
    /// file loader.
    pub fn new(
        name: &str,
        items: Vec<IndicatorItem>,
        scales: Vec<Scale>,
        covariates: Vec<CovariateSpec>,
        rules: Vec<ConsistencyRule>,
    ) -> Result<Self, SurveyError> {
        let mut schema = SurveySchema {
            name: name.to_string(),
            items,
            scales,
            covariates,
            rules,
            item_order: Vec::new(),
        };
        schema.finish()?;
        Ok(schema)
    }

    fn finish(&mut self) -> Result<(), SurveyError> {
        let mut seen = BTreeSet::new();
        for item in &self.items {
            if !seen.insert(item.code.clone()) {
                return Err(SurveyError::Schema(format!(
                    "duplicate item code {}",
                    item.code
                )));
            }
        }
        let mut in_scale = BTreeSet::new();
        for scale in &self.scales {
            if scale.items.len() < 2 {
                return Err(SurveyError::Schema(format!(
                    "scale {} has fewer than 2 items",
                    scale.id
                )));
            }
            for code in &scale.items {
                if !seen.contains(code) {
                    return Err(SurveyError::Schema(format!(
                        "scale {} references unknown item {code}",
                        scale.id
                    )));
                }
                if !in_scale.insert(code.clone()) {
                    return Err(SurveyError::Schema(format!(
                        "item {code} appears in more than one scale"
                    )));
                }
            }
        }
        let mut cov_seen = BTreeSet::new();
        for cov in &self.covariates {
            if seen.contains(&cov.code) || !cov_seen.insert(cov.code.clone()) {
                return Err(SurveyError::Schema(format!(
                    "covariate code {} collides with another column",
                    cov.code
                )));
            }
            if let CovariateKind::Categorical { levels } = &cov.kind {
                if levels.is_empty() {
                    return Err(SurveyError::Schema(format!(
                        "categorical covariate {} declares no levels",
                        cov.code
                    )));
                }
            }
        }
        self.item_order = self.items.iter().map(|i| i.code.clone()).collect();
        Ok(())
    }

    /// All item codes in declaration order.
    pub fn item_codes(&self) -> &[String] {
        &self.item_order
    }

    pub fn has_item(&self, code: &str) -> bool {
        self.items.iter().any(|i| i.code == code)
    }

    pub fn scale(&self, id: &str) -> Option<&Scale> {
        self.scales.iter().find(|s| s.id == id)
    }

    pub fn covariate(&self, code: &str) -> Option<&CovariateSpec> {
        self.covariates.iter().find(|c| c.code == code)
    }

    /// Items belonging to non-attribute scales, i.e. the indicators that feed
    /// the factor analysis.
    pub fn analysis_items(&self) -> Vec<String> {
        self.scales
            .iter()
            .filter(|s| !s.attribute_set)
            .flat_map(|s| s.items.iter().cloned())
            .collect()
    }

    /// Items of attribute batteries (ranked by the decision stage).
    pub fn attribute_items(&self) -> Vec<String> {
        self.scales
            .iter()
            .filter(|s| s.attribute_set)
            .flat_map(|s| s.items.iter().cloned())
            .collect()
    }

    /// Items that must be complete after cleaning: every item that belongs to
    /// any scale (analysis indicators and attribute batteries alike).
    pub fn required_items(&self) -> Vec<String> {
        let mut v = self.analysis_items();
        v.extend(self.attribute_items());
        v
    }
}
