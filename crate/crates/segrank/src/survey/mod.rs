//! Survey data model: schema, loading, cleaning and descriptive statistics
//! for 7-point Likert questionnaires.

mod clean;
mod describe;
mod load;
mod schema;

pub use clean::{clean_dataset, CleaningReport, DropReason, DroppedRecord};
pub use describe::{likert_distribution, required_sample_size, weighted_mean, DistributionRow};
pub use load::{load_dataset, load_dataset_from_reader, LoadReport, RowError};
pub use schema::{
    ConsistencyRule, CovariateKind, CovariateSpec, IndicatorItem, Scale, SurveySchema,
};

use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// A single response on the fixed 1..=7 agreement/importance scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LikertValue(u8);

impl LikertValue {
    pub const MIN: u8 = 1;
    pub const MAX: u8 = 7;

    pub fn new(value: u8) -> Result<Self, SurveyError> {
        if (Self::MIN..=Self::MAX).contains(&value) {
            Ok(Self(value))
        } else {
            Err(SurveyError::OutOfRange(value))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// Zero-based level index (value 1 maps to 0).
    pub fn index(self) -> usize {
        usize::from(self.0 - 1)
    }
}

impl fmt::Display for LikertValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl TryFrom<u8> for LikertValue {
    type Error = SurveyError;

    fn try_from(value: u8) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

/// Typed value of a covariate column.
#[derive(Debug, Clone, PartialEq)]
pub enum CovariateValue {
    Categorical(String),
    Continuous(f64),
}

/// One respondent's row: indicator/attribute responses plus covariates.
/// Missing cells are kept as `None` until cleaning.
#[derive(Debug, Clone)]
pub struct SurveyRecord {
    pub respondent_id: String,
    pub responses: BTreeMap<String, Option<LikertValue>>,
    pub covariates: BTreeMap<String, Option<CovariateValue>>,
}

impl SurveyRecord {
    pub fn response(&self, code: &str) -> Option<LikertValue> {
        self.responses.get(code).copied().flatten()
    }

    pub fn covariate(&self, code: &str) -> Option<&CovariateValue> {
        self.covariates.get(code).and_then(|v| v.as_ref())
    }
}

/// A validated table of survey responses conforming to a [`SurveySchema`].
#[derive(Debug, Clone)]
pub struct SurveyDataset {
    pub schema: SurveySchema,
    pub records: Vec<SurveyRecord>,
    /// Where the data came from (path or "synthetic:<seed>").
    pub provenance: String,
}

impl SurveyDataset {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Column of responses for one item over all records; `None` where missing.
    pub fn item_column(&self, code: &str) -> Vec<Option<LikertValue>> {
        self.records.iter().map(|r| r.response(code)).collect()
    }

    /// Numeric column for one item; errors if any record is missing the item.
    pub fn item_values(&self, code: &str) -> Result<Vec<f64>, SurveyError> {
        self.records
            .iter()
            .map(|r| {
                r.response(code)
                    .map(|v| f64::from(v.get()))
                    .ok_or_else(|| SurveyError::MissingResponse {
                        respondent: r.respondent_id.clone(),
                        item: code.to_string(),
                    })
            })
            .collect()
    }

    /// Serialize records back to CSV with the schema's canonical column order.
    pub fn to_csv<W: std::io::Write>(&self, writer: W) -> Result<(), SurveyError> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["respondent_id".to_string()];
        header.extend(self.schema.item_codes().iter().cloned());
        header.extend(self.schema.covariates.iter().map(|c| c.code.clone()));
        w.write_record(&header)?;
        for rec in &self.records {
            let mut row = vec![rec.respondent_id.clone()];
            for code in self.schema.item_codes() {
                row.push(match rec.response(code) {
                    Some(v) => v.to_string(),
                    None => String::new(),
                });
            }
            for cov in &self.schema.covariates {
                row.push(match rec.covariate(&cov.code) {
                    Some(CovariateValue::Categorical(s)) => s.clone(),
                    Some(CovariateValue::Continuous(x)) => format!("{x}"),
                    None => String::new(),
                });
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum SurveyError {
    #[error("Likert value {0} outside the 1..=7 scale")]
    OutOfRange(u8),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("unknown column in header: {0}")]
    UnknownColumn(String),
    #[error("missing required column: {0}")]
    MissingColumn(String),
    #[error("unknown item code: {0}")]
    UnknownItem(String),
    #[error("respondent {respondent} has no response for item {item}")]
    MissingResponse { respondent: String, item: String },
    #[error("cleaning removed every record ({dropped} dropped)")]
    EmptyAfterCleaning { dropped: usize },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("schema file error: {0}")]
    SchemaFile(#[from] toml::de::Error),
    #[error("{0}")]
    Invalid(String),
}
