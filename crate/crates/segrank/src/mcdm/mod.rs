//! Multi-criteria ranking of attribute batteries: decision-matrix
//! construction from within-class response distributions, plus MOORA,
//! TOPSIS and VIKOR.

mod methods;

pub use methods::{moora_rank, topsis_rank, vikor_rank, Method, MethodResult, VikorDiagnostics};

use crate::survey::{LikertValue, SurveyDataset};
use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum McdmError {
    #[error("decision matrix values must be non-negative (found {value} at row {row})")]
    NegativeValue { row: usize, value: f64 },
    #[error("criterion {0} is all zero")]
    AllZeroColumn(String),
    #[error("criterion weights must be positive")]
    BadWeights,
    #[error("need at least 2 alternatives, have {0}")]
    TooFewAlternatives(usize),
    #[error("class has {have} members, need at least {needed}")]
    ClassTooSmall { have: usize, needed: usize },
    #[error("attribute {item} has no responses in this class")]
    NoResponses { item: String },
    #[error("score for alternative {0} is not finite")]
    NonFiniteScore(usize),
    #[error("VIKOR weight v must lie in [0, 1], got {0}")]
    BadVikorWeight(f64),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Survey(#[from] crate::survey::SurveyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Benefit,
    Cost,
}

#[derive(Debug, Clone)]
pub struct Criterion {
    pub name: String,
    pub direction: Direction,
    pub weight: f64,
}

/// Alternatives x criteria matrix with directions and normalized weights.
#[derive(Debug, Clone)]
pub struct DecisionMatrix {
    pub alternatives: Vec<String>,
    pub criteria: Vec<Criterion>,
    pub values: DMatrix<f64>,
}

impl DecisionMatrix {
    /// Validates non-negativity, forbids all-zero criterion columns and
    /// normalizes the weights to sum to one.
    pub fn new(
        alternatives: Vec<String>,
        mut criteria: Vec<Criterion>,
        values: DMatrix<f64>,
    ) -> Result<Self, McdmError> {
        let a = alternatives.len();
        let c = criteria.len();
        if a < 2 {
            return Err(McdmError::TooFewAlternatives(a));
        }
        if values.nrows() != a || values.ncols() != c {
            return Err(McdmError::Shape(format!(
                "matrix is {}x{}, expected {a}x{c}",
                values.nrows(),
                values.ncols()
            )));
        }
        for i in 0..a {
            for j in 0..c {
                if values[(i, j)] < 0.0 {
                    return Err(McdmError::NegativeValue {
                        row: i,
                        value: values[(i, j)],
                    });
                }
            }
        }
        for (j, criterion) in criteria.iter().enumerate() {
            if values.column(j).iter().all(|&x| x == 0.0) {
                return Err(McdmError::AllZeroColumn(criterion.name.clone()));
            }
        }
        let weight_sum: f64 = criteria.iter().map(|c| c.weight).sum();
        if criteria.iter().any(|c| c.weight <= 0.0) || weight_sum <= 0.0 {
            return Err(McdmError::BadWeights);
        }
        for criterion in criteria.iter_mut() {
            criterion.weight /= weight_sum;
        }
        Ok(Self {
            alternatives,
            criteria,
            values,
        })
    }

    pub fn n_alternatives(&self) -> usize {
        self.alternatives.len()
    }

    pub fn n_criteria(&self) -> usize {
        self.criteria.len()
    }
}

/// Ranks over alternatives: competition ranks for reporting, index-broken
/// total orders for aggregation (which needs permutations), and the groups
/// of alternatives that tied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankVector {
    /// Minimum (competition) rank per alternative; ties share a rank.
    pub competition: Vec<usize>,
    /// Total order: ties broken by alternative index.
    pub total_order: Vec<usize>,
    /// Tied groups (alternative indices), recorded for the reports.
    pub ties: Vec<Vec<usize>>,
}

/// Rank a score vector. `higher_is_better` controls the sort direction.
pub fn ranks_from_scores(scores: &[f64], higher_is_better: bool) -> Result<RankVector, McdmError> {
    if let Some(idx) = scores.iter().position(|s| !s.is_finite()) {
        return Err(McdmError::NonFiniteScore(idx));
    }
    let a = scores.len();
    let better = |x: f64, y: f64| -> bool {
        if higher_is_better {
            x > y
        } else {
            x < y
        }
    };
    let mut competition = vec![0usize; a];
    for i in 0..a {
        competition[i] = 1 + scores.iter().filter(|&&s| better(s, scores[i])).count();
    }
    let mut order: Vec<usize> = (0..a).collect();
    order.sort_by(|&x, &y| {
        if better(scores[x], scores[y]) {
            std::cmp::Ordering::Less
        } else if better(scores[y], scores[x]) {
            std::cmp::Ordering::Greater
        } else {
            x.cmp(&y)
        }
    });
    let mut total_order = vec![0usize; a];
    for (rank, &alt) in order.iter().enumerate() {
        total_order[alt] = rank + 1;
    }
    let mut ties: Vec<Vec<usize>> = Vec::new();
    let mut seen = vec![false; a];
    for i in 0..a {
        if seen[i] {
            continue;
        }
        let group: Vec<usize> = (i..a).filter(|&j| scores[j] == scores[i]).collect();
        if group.len() > 1 {
            for &g in &group {
                seen[g] = true;
            }
            ties.push(group);
        }
    }
    Ok(RankVector {
        competition,
        total_order,
        ties,
    })
}

/// Which attribute battery a decision problem ranks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttributeKind {
    Motivator,
    Deterrent,
}

/// How the decision matrix is built from within-class responses.
#[derive(Debug, Clone)]
pub enum MatrixConstruction {
    /// Criteria are the response shares of the listed Likert levels; the
    /// benefit side rewards high agreement, the cost side penalizes low
    /// agreement. Level 4 (the neutral midpoint) is excluded by default.
    LevelShares {
        benefit_levels: Vec<u8>,
        cost_levels: Vec<u8>,
    },
    /// Single benefit criterion: the within-class mean importance.
    MeanImportance,
}

impl Default for MatrixConstruction {
    fn default() -> Self {
        MatrixConstruction::LevelShares {
            benefit_levels: vec![5, 6, 7],
            cost_levels: vec![1, 2, 3],
        }
    }
}

/// Minimum class size accepted by the decision stage.
pub const MIN_CLASS_SIZE: usize = 5;

/// Build the class decision matrix over the attribute items: alternatives
/// are attributes; criteria come from the construction rule (level shares
/// with equal weights by default). Empty level columns are dropped with a
/// warning so the matrix invariant holds.
pub fn build_decision_matrix(
    ds: &SurveyDataset,
    class_members: &[usize],
    attribute_items: &[String],
    _kind: AttributeKind,
    construction: &MatrixConstruction,
) -> Result<(DecisionMatrix, Vec<String>), McdmError> {
    if class_members.len() < MIN_CLASS_SIZE {
        return Err(McdmError::ClassTooSmall {
            have: class_members.len(),
            needed: MIN_CLASS_SIZE,
        });
    }
    let mut warnings = Vec::new();

    // tally responses per attribute within the class
    let mut level_counts: Vec<[usize; 7]> = vec![[0; 7]; attribute_items.len()];
    let mut totals: Vec<usize> = vec![0; attribute_items.len()];
    for (row, item) in attribute_items.iter().enumerate() {
        for &member in class_members {
            let record = ds.records.get(member).ok_or_else(|| {
                McdmError::Shape(format!("class member index {member} out of range"))
            })?;
            if let Some(value) = record.response(item) {
                level_counts[row][value.index()] += 1;
                totals[row] += 1;
            }
        }
        if totals[row] == 0 {
            return Err(McdmError::NoResponses { item: item.clone() });
        }
    }

    match construction {
        MatrixConstruction::LevelShares {
            benefit_levels,
            cost_levels,
        } => {
            let mut spec: Vec<(u8, Direction)> = Vec::new();
            for &level in cost_levels {
                spec.push((level, Direction::Cost));
            }
            for &level in benefit_levels {
                spec.push((level, Direction::Benefit));
            }
            spec.sort_by_key(|(level, _)| *level);

            let mut kept: Vec<(u8, Direction)> = Vec::new();
            for &(level, direction) in &spec {
                let idx = LikertValue::new(level)
                    .map_err(|_| McdmError::Shape(format!("level {level} outside 1..=7")))?
                    .index();
                let nonzero = level_counts.iter().any(|counts| counts[idx] > 0);
                if nonzero {
                    kept.push((level, direction));
                } else {
                    warnings.push(format!(
                        "criterion level_{level} dropped: no class member chose level {level}"
                    ));
                }
            }
            if kept.len() < 2 {
                return Err(McdmError::Shape(
                    "fewer than 2 non-empty criterion levels".into(),
                ));
            }

            let a = attribute_items.len();
            let c = kept.len();
            let mut values = DMatrix::zeros(a, c);
            for row in 0..a {
                for (col, &(level, _)) in kept.iter().enumerate() {
                    let idx = (level - 1) as usize;
                    values[(row, col)] =
                        100.0 * level_counts[row][idx] as f64 / totals[row] as f64;
                }
            }
            let criteria: Vec<Criterion> = kept
                .iter()
                .map(|&(level, direction)| Criterion {
                    name: format!("level_{level}"),
                    direction,
                    weight: 1.0,
                })
                .collect();
            let matrix = DecisionMatrix::new(attribute_items.to_vec(), criteria, values)?;
            Ok((matrix, warnings))
        }
        MatrixConstruction::MeanImportance => {
            let a = attribute_items.len();
            let mut values = DMatrix::zeros(a, 1);
            for row in 0..a {
                let sum: usize = level_counts[row]
                    .iter()
                    .enumerate()
                    .map(|(idx, count)| (idx + 1) * count)
                    .sum();
                values[(row, 0)] = sum as f64 / totals[row] as f64;
            }
            let matrix = DecisionMatrix::new(
                attribute_items.to_vec(),
                vec![Criterion {
                    name: "mean_importance".into(),
                    direction: Direction::Benefit,
                    weight: 1.0,
                }],
                values,
            )?;
            Ok((matrix, warnings))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::survey::{IndicatorItem, Scale, SurveyRecord, SurveySchema};
    use std::collections::BTreeMap;

    fn attribute_ds(rows: &[[u8; 2]]) -> SurveyDataset {
        let schema = SurveySchema::new(
            "t",
            vec![
                IndicatorItem { code: "A".into(), prompt: String::new(), scale: "attrs".into() },
                IndicatorItem { code: "B".into(), prompt: String::new(), scale: "attrs".into() },
            ],
            vec![Scale {
                id: "attrs".into(),
                name: String::new(),
                items: vec!["A".into(), "B".into()],
                attribute_set: true,
            }],
            vec![],
            vec![],
        )
        .unwrap();
        let records = rows
            .iter()
            .enumerate()
            .map(|(i, row)| SurveyRecord {
                respondent_id: format!("r{i}"),
                responses: BTreeMap::from([
                    ("A".to_string(), Some(LikertValue::new(row[0]).unwrap())),
                    ("B".to_string(), Some(LikertValue::new(row[1]).unwrap())),
                ]),
                covariates: BTreeMap::new(),
            })
            .collect();
        SurveyDataset {
            schema,
            records,
            provenance: "test".into(),
        }
    }

    #[test]
    fn dominant_attribute_gets_full_top_share() {
        let ds = attribute_ds(&[[7, 5], [7, 5], [7, 5], [7, 5], [7, 5]]);
        let members: Vec<usize> = (0..5).collect();
        let items = vec!["A".to_string(), "B".to_string()];
        let (dm, warnings) = build_decision_matrix(
            &ds,
            &members,
            &items,
            AttributeKind::Motivator,
            &MatrixConstruction::default(),
        )
        .unwrap();
        // levels 1..3 are empty, so only 5 and 7 columns survive
        assert!(!warnings.is_empty());
        let level7 = dm
            .criteria
            .iter()
            .position(|c| c.name == "level_7")
            .unwrap();
        assert_eq!(dm.values[(0, level7)], 100.0);
        assert_eq!(dm.values[(1, level7)], 0.0);
    }

    #[test]
    fn identical_distributions_make_identical_rows() {
        let ds = attribute_ds(&[[2, 2], [5, 5], [7, 7], [4, 4], [1, 1], [6, 6]]);
        let members: Vec<usize> = (0..6).collect();
        let items = vec!["A".to_string(), "B".to_string()];
        let (dm, _) = build_decision_matrix(
            &ds,
            &members,
            &items,
            AttributeKind::Deterrent,
            &MatrixConstruction::default(),
        )
        .unwrap();
        for j in 0..dm.n_criteria() {
            assert_eq!(dm.values[(0, j)], dm.values[(1, j)]);
        }
    }

    #[test]
    fn counting_oracle_matches_shares() {
        // staged distribution: A answers 6,6,7,5,1; B answers 2,2,3,6,6
        let ds = attribute_ds(&[[6, 2], [6, 2], [7, 3], [5, 6], [1, 6]]);
        let members: Vec<usize> = (0..5).collect();
        let items = vec!["A".to_string(), "B".to_string()];
        let (dm, _) = build_decision_matrix(
            &ds,
            &members,
            &items,
            AttributeKind::Motivator,
            &MatrixConstruction::default(),
        )
        .unwrap();
        // independent tally: shares out of 5 = 20% per respondent
        let share = |name: &str, row: usize| -> f64 {
            let j = dm.criteria.iter().position(|c| c.name == name).unwrap();
            dm.values[(row, j)]
        };
        assert_eq!(share("level_6", 0), 40.0);
        assert_eq!(share("level_7", 0), 20.0);
        assert_eq!(share("level_5", 0), 20.0);
        assert_eq!(share("level_1", 0), 20.0);
        assert_eq!(share("level_2", 1), 40.0);
        assert_eq!(share("level_3", 1), 20.0);
        assert_eq!(share("level_6", 1), 40.0);
    }

    #[test]
    fn small_class_is_rejected() {
        let ds = attribute_ds(&[[7, 5], [7, 5]]);
        let items = vec!["A".to_string(), "B".to_string()];
        let err = build_decision_matrix(
            &ds,
            &[0, 1],
            &items,
            AttributeKind::Motivator,
            &MatrixConstruction::default(),
        )
        .unwrap_err();
        assert!(matches!(err, McdmError::ClassTooSmall { have: 2, needed: 5 }));
    }

    #[test]
    fn mean_importance_construction() {
        let ds = attribute_ds(&[[7, 1], [6, 2], [7, 1], [6, 2], [7, 1]]);
        let members: Vec<usize> = (0..5).collect();
        let items = vec!["A".to_string(), "B".to_string()];
        let (dm, _) = build_decision_matrix(
            &ds,
            &members,
            &items,
            AttributeKind::Motivator,
            &MatrixConstruction::MeanImportance,
        )
        .unwrap();
        assert_eq!(dm.n_criteria(), 1);
        assert!((dm.values[(0, 0)] - 6.6).abs() < 1e-12);
        assert!((dm.values[(1, 0)] - 1.4).abs() < 1e-12);
    }

    #[test]
    fn negative_values_rejected() {
        let values = DMatrix::from_row_slice(2, 1, &[1.0, -0.5]);
        let err = DecisionMatrix::new(
            vec!["a".into(), "b".into()],
            vec![Criterion {
                name: "c".into(),
                direction: Direction::Benefit,
                weight: 1.0,
            }],
            values,
        )
        .unwrap_err();
        assert!(matches!(err, McdmError::NegativeValue { row: 1, .. }));
    }

    #[test]
    fn rank_reference_cases() {
        let r = ranks_from_scores(&[0.9, 0.1, 0.5], true).unwrap();
        assert_eq!(r.competition, vec![1, 3, 2]);
        assert_eq!(r.total_order, vec![1, 3, 2]);
        assert!(r.ties.is_empty());

        let r = ranks_from_scores(&[0.5, 0.5, 0.1], true).unwrap();
        assert_eq!(r.competition, vec![1, 1, 3]);
        assert_eq!(r.total_order, vec![1, 2, 3]);
        assert_eq!(r.ties, vec![vec![0, 1]]);

        let r = ranks_from_scores(&[0.2, 0.2, 0.2], true).unwrap();
        assert_eq!(r.competition, vec![1, 1, 1]);
        assert_eq!(r.total_order, vec![1, 2, 3]);

        assert!(matches!(
            ranks_from_scores(&[0.1, f64::NAN], true),
            Err(McdmError::NonFiniteScore(1))
        ));
    }
}
