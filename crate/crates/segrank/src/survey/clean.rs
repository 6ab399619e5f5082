//! Listwise cleaning: drop incomplete and rule-violating respondents.

use super::schema::ConsistencyRule;
use super::{SurveyDataset, SurveyError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DropReason {
    /// No scale item answered at all.
    Unfilled,
    /// Some but not all scale items answered.
    PartiallyFilled,
    /// Failed a configured consistency rule.
    Inconsistent,
}

impl DropReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            DropReason::Unfilled => "un-filled",
            DropReason::PartiallyFilled => "partially-filled",
            DropReason::Inconsistent => "inconsistent",
        }
    }
}

impl std::fmt::Display for DropReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct DroppedRecord {
    pub respondent_id: String,
    pub reason: DropReason,
    /// Rule name or missing-item detail.
    pub detail: String,
}

#[derive(Debug, Default)]
pub struct CleaningReport {
    pub input_records: usize,
    pub kept_records: usize,
    pub dropped: Vec<DroppedRecord>,
}

impl CleaningReport {
    pub fn to_csv<W: std::io::Write>(&self, writer: W) -> Result<(), SurveyError> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["respondent_id", "reason", "detail"])?;
        for d in &self.dropped {
            w.write_record([&d.respondent_id, d.reason.as_str(), &d.detail])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Drop records that are incomplete on any scale item or violate a
/// consistency rule. No imputation is performed: cleaning is listwise only.
/// The kept/dropped counts always partition the input.
pub fn clean_dataset(
    raw: &SurveyDataset,
    rules: &[ConsistencyRule],
) -> Result<(SurveyDataset, CleaningReport), SurveyError> {
    let required = raw.schema.required_items();
    let mut kept = Vec::new();
    let mut report = CleaningReport {
        input_records: raw.len(),
        ..Default::default()
    };

    'records: for record in &raw.records {
        let missing: Vec<&String> = required
            .iter()
            .filter(|code| record.response(code).is_none())
            .collect();
        if !missing.is_empty() {
            let reason = if missing.len() == required.len() {
                DropReason::Unfilled
            } else {
                DropReason::PartiallyFilled
            };
            report.dropped.push(DroppedRecord {
                respondent_id: record.respondent_id.clone(),
                reason,
                detail: format!("missing {}", missing[0]),
            });
            continue;
        }
        for rule in rules {
            if rule.violated(record) {
                report.dropped.push(DroppedRecord {
                    respondent_id: record.respondent_id.clone(),
                    reason: DropReason::Inconsistent,
                    detail: rule.name().to_string(),
                });
                continue 'records;
            }
        }
        kept.push(record.clone());
    }

    report.kept_records = kept.len();
    debug_assert_eq!(report.kept_records + report.dropped.len(), report.input_records);
    if kept.is_empty() {
        return Err(SurveyError::EmptyAfterCleaning {
            dropped: report.dropped.len(),
        });
    }

    Ok((
        SurveyDataset {
            schema: raw.schema.clone(),
            records: kept,
            provenance: raw.provenance.clone(),
        },
        report,
    ))
}
