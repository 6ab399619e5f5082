//! CSV ingestion with per-row validation.
//!
//! Structural problems (bad header) abort the load; cell-level problems are
//! recorded as row errors and the offending row is skipped, so the caller
//! always learns exactly which respondents were lost and why.

use super::schema::{CovariateKind, SurveySchema};
use super::{CovariateValue, LikertValue, SurveyDataset, SurveyError, SurveyRecord};
use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::path::Path;

/// One rejected row.
#[derive(Debug, Clone, PartialEq)]
pub struct RowError {
    /// 1-based data row number (header not counted).
    pub row: usize,
    /// Offending column, when attributable to one.
    pub column: Option<String>,
    pub message: String,
}

impl std::fmt::Display for RowError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.column {
            Some(c) => write!(f, "row {}: column {}: {}", self.row, c, self.message),
            None => write!(f, "row {}: {}", self.row, self.message),
        }
    }
}

#[derive(Debug, Default)]
pub struct LoadReport {
    pub rows_read: usize,
    pub rows_loaded: usize,
    pub row_errors: Vec<RowError>,
}

/// Load a survey CSV against a schema.
pub fn load_dataset(path: &Path, schema: &SurveySchema) -> Result<(SurveyDataset, LoadReport), SurveyError> {
    let file = std::fs::File::open(path)?;
    let provenance = path.display().to_string();
    load_dataset_from_reader(file, schema, &provenance)
}

pub fn load_dataset_from_reader<R: Read>(
    reader: R,
    schema: &SurveySchema,
    provenance: &str,
) -> Result<(SurveyDataset, LoadReport), SurveyError> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let headers = rdr.headers()?.clone();

    let mut id_col = None;
    let mut item_cols: BTreeMap<usize, String> = BTreeMap::new();
    let mut cov_cols: BTreeMap<usize, String> = BTreeMap::new();
    for (idx, name) in headers.iter().enumerate() {
        if name == "respondent_id" {
            id_col = Some(idx);
        } else if schema.has_item(name) {
            item_cols.insert(idx, name.to_string());
        } else if schema.covariate(name).is_some() {
            cov_cols.insert(idx, name.to_string());
        } else {
            return Err(SurveyError::UnknownColumn(name.to_string()));
        }
    }
    let id_col = id_col.ok_or_else(|| SurveyError::MissingColumn("respondent_id".into()))?;
    for code in schema.item_codes() {
        if !item_cols.values().any(|c| c == code) {
            return Err(SurveyError::MissingColumn(code.clone()));
        }
    }

    let mut report = LoadReport::default();
    let mut records = Vec::new();
    let mut seen_ids: BTreeSet<String> = BTreeSet::new();

    for (row_idx, result) in rdr.records().enumerate() {
        let row = row_idx + 1;
        report.rows_read += 1;
        let record = match result {
            Ok(r) => r,
            Err(e) => {
                report.row_errors.push(RowError {
                    row,
                    column: None,
                    message: format!("unparseable row: {e}"),
                });
                continue;
            }
        };
        match parse_row(&record, row, id_col, &item_cols, &cov_cols, schema, &mut seen_ids) {
            Ok(rec) => {
                records.push(rec);
                report.rows_loaded += 1;
            }
            Err(err) => report.row_errors.push(err),
        }
    }

    Ok((
        SurveyDataset {
            schema: schema.clone(),
            records,
            provenance: provenance.to_string(),
        },
        report,
    ))
}

fn parse_row(
    record: &csv::StringRecord,
    row: usize,
    id_col: usize,
    item_cols: &BTreeMap<usize, String>,
    cov_cols: &BTreeMap<usize, String>,
    schema: &SurveySchema,
    seen_ids: &mut BTreeSet<String>,
) -> Result<SurveyRecord, RowError> {
    let fail = |column: Option<&str>, message: String| RowError {
        row,
        column: column.map(str::to_string),
        message,
    };

    let id = record
        .get(id_col)
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .ok_or_else(|| fail(Some("respondent_id"), "empty respondent id".into()))?
        .to_string();
    if !seen_ids.insert(id.clone()) {
        return Err(fail(
            Some("respondent_id"),
            format!("duplicate respondent_id {id}"),
        ));
    }

    let mut responses = BTreeMap::new();
    for (&idx, code) in item_cols {
        let raw = record.get(idx).map(str::trim).unwrap_or("");
        let value = if raw.is_empty() {
            None
        } else {
            let n: u8 = raw.parse().map_err(|_| {
                fail(Some(code), format!("non-integer Likert cell {raw:?}"))
            })?;
            Some(LikertValue::new(n).map_err(|_| {
                fail(
                    Some(code),
                    format!("Likert value {n} outside the 1..=7 scale"),
                )
            })?)
        };
        responses.insert(code.clone(), value);
    }

    let mut covariates = BTreeMap::new();
    for (&idx, code) in cov_cols {
        let spec = schema.covariate(code).expect("checked in header pass");
        let raw = record.get(idx).map(str::trim).unwrap_or("");
        let value = if raw.is_empty() {
            None
        } else {
            match &spec.kind {
                CovariateKind::Categorical { levels } => {
                    if !levels.iter().any(|l| l == raw) {
                        return Err(fail(
                            Some(code),
                            format!("value {raw:?} not among declared levels"),
                        ));
                    }
                    Some(CovariateValue::Categorical(raw.to_string()))
                }
                CovariateKind::Continuous { .. } => {
                    let x: f64 = raw.parse().map_err(|_| {
                        fail(Some(code), format!("non-numeric value {raw:?}"))
                    })?;
                    Some(CovariateValue::Continuous(x))
                }
            }
        };
        covariates.insert(code.clone(), value);
    }

    Ok(SurveyRecord {
        respondent_id: id,
        responses,
        covariates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::survey::schema::{IndicatorItem, Scale};

    fn tiny_schema() -> SurveySchema {
        SurveySchema::new(
            "tiny",
            vec![
                IndicatorItem { code: "I1".into(), prompt: String::new(), scale: "s".into() },
                IndicatorItem { code: "I2".into(), prompt: String::new(), scale: "s".into() },
            ],
            vec![Scale {
                id: "s".into(),
                name: String::new(),
                items: vec!["I1".into(), "I2".into()],
                attribute_set: false,
            }],
            vec![],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn loads_valid_rows_without_errors() {
        let csv = "respondent_id,I1,I2\nr1,3,4\nr2,5,5\nr3,1,7\n";
        let (ds, report) =
            load_dataset_from_reader(csv.as_bytes(), &tiny_schema(), "mem").unwrap();
        assert_eq!(ds.len(), 3);
        assert!(report.row_errors.is_empty());
        assert_eq!(ds.records[0].response("I2").unwrap().get(), 4);
    }

    #[test]
    fn out_of_range_cell_names_item_and_row() {
        let csv = "respondent_id,I1,I2\nr1,8,4\nr2,5,5\n";
        let (ds, report) =
            load_dataset_from_reader(csv.as_bytes(), &tiny_schema(), "mem").unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(report.row_errors.len(), 1);
        let err = &report.row_errors[0];
        assert_eq!(err.row, 1);
        assert_eq!(err.column.as_deref(), Some("I1"));
    }

    #[test]
    fn non_integer_cell_is_a_row_error() {
        let csv = "respondent_id,I1,I2\nr1,x,4\n";
        let (ds, report) =
            load_dataset_from_reader(csv.as_bytes(), &tiny_schema(), "mem").unwrap();
        assert_eq!(ds.len(), 0);
        assert!(report.row_errors[0].message.contains("non-integer"));
    }

    #[test]
    fn duplicate_id_skips_later_row() {
        let csv = "respondent_id,I1,I2\nr1,3,4\nr1,5,5\n";
        let (ds, report) =
            load_dataset_from_reader(csv.as_bytes(), &tiny_schema(), "mem").unwrap();
        assert_eq!(ds.len(), 1);
        assert!(report.row_errors[0].message.contains("duplicate"));
    }

    #[test]
    fn unknown_column_aborts_load() {
        let csv = "respondent_id,I1,I2,bogus\nr1,3,4,9\n";
        let err = load_dataset_from_reader(csv.as_bytes(), &tiny_schema(), "mem").unwrap_err();
        assert!(matches!(err, SurveyError::UnknownColumn(c) if c == "bogus"));
    }

    #[test]
    fn load_serialize_load_roundtrip() {
        let csv = "respondent_id,I1,I2\nr1,3,\nr2,5,5\n";
        let schema = tiny_schema();
        let (ds, _) = load_dataset_from_reader(csv.as_bytes(), &schema, "mem").unwrap();
        let mut buf = Vec::new();
        ds.to_csv(&mut buf).unwrap();
        let (ds2, report) = load_dataset_from_reader(buf.as_slice(), &schema, "mem").unwrap();
        assert!(report.row_errors.is_empty());
        assert_eq!(ds2.len(), ds.len());
        for (a, b) in ds.records.iter().zip(&ds2.records) {
            assert_eq!(a.respondent_id, b.respondent_id);
            assert_eq!(a.responses, b.responses);
        }
    }
}
