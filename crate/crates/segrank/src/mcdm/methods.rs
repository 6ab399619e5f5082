//! MOORA, TOPSIS and VIKOR over a validated decision matrix.

use super::{ranks_from_scores, DecisionMatrix, Direction, McdmError, RankVector};
use nalgebra::DMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Moora,
    Topsis,
    Vikor,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Moora => "MOORA",
            Method::Topsis => "TOPSIS",
            Method::Vikor => "VIKOR",
        }
    }
}

#[derive(Debug, Clone)]
pub struct VikorDiagnostics {
    /// Group utility per alternative.
    pub s: Vec<f64>,
    /// Individual regret per alternative.
    pub r: Vec<f64>,
    /// Compromise index per alternative.
    pub q: Vec<f64>,
    /// Q(2) - Q(1) >= 1/(a-1) for the sorted compromise index.
    pub acceptable_advantage: bool,
    /// The Q-best alternative is also best by S or by R.
    pub acceptable_stability: bool,
}

#[derive(Debug, Clone)]
pub struct MethodResult {
    pub method: Method,
    pub scores: Vec<f64>,
    pub ranks: RankVector,
    pub vikor: Option<VikorDiagnostics>,
    pub warnings: Vec<String>,
}

fn column_vector_normalized(dm: &DecisionMatrix) -> Result<DMatrix<f64>, McdmError> {
    let a = dm.n_alternatives();
    let c = dm.n_criteria();
    let mut normalized = DMatrix::zeros(a, c);
    for j in 0..c {
        let norm: f64 = dm
            .values
            .column(j)
            .iter()
            .map(|&x| x * x)
            .sum::<f64>()
            .sqrt();
        if norm == 0.0 {
            return Err(McdmError::AllZeroColumn(dm.criteria[j].name.clone()));
        }
        for i in 0..a {
            normalized[(i, j)] = dm.values[(i, j)] / norm;
        }
    }
    Ok(normalized)
}

/// Ratio-system scoring: vector-normalize each criterion, then benefit
/// columns add and cost columns subtract (weighted). Higher is better.
pub fn moora_rank(dm: &DecisionMatrix) -> Result<MethodResult, McdmError> {
    let normalized = column_vector_normalized(dm)?;
    let a = dm.n_alternatives();
    let mut scores = vec![0.0; a];
    for i in 0..a {
        for (j, criterion) in dm.criteria.iter().enumerate() {
            let contribution = criterion.weight * normalized[(i, j)];
            match criterion.direction {
                Direction::Benefit => scores[i] += contribution,
                Direction::Cost => scores[i] -= contribution,
            }
        }
    }
    let ranks = ranks_from_scores(&scores, true)?;
    let warnings = tie_warnings(&ranks);
    Ok(MethodResult {
        method: Method::Moora,
        scores,
        ranks,
        vikor: None,
        warnings,
    })
}

/// Closeness to the positive ideal: weighted vector normalization, ideal and
/// anti-ideal per direction, Euclidean distances, C = d-/(d+ + d-).
pub fn topsis_rank(dm: &DecisionMatrix) -> Result<MethodResult, McdmError> {
    let normalized = column_vector_normalized(dm)?;
    let a = dm.n_alternatives();
    let c = dm.n_criteria();
    let mut weighted = normalized;
    for j in 0..c {
        for i in 0..a {
            weighted[(i, j)] *= dm.criteria[j].weight;
        }
    }
    let mut ideal = vec![0.0; c];
    let mut anti = vec![0.0; c];
    for j in 0..c {
        let column: Vec<f64> = weighted.column(j).iter().copied().collect();
        let max = column.iter().cloned().fold(f64::MIN, f64::max);
        let min = column.iter().cloned().fold(f64::MAX, f64::min);
        match dm.criteria[j].direction {
            Direction::Benefit => {
                ideal[j] = max;
                anti[j] = min;
            }
            Direction::Cost => {
                ideal[j] = min;
                anti[j] = max;
            }
        }
    }
    let mut warnings = Vec::new();
    let mut scores = vec![0.0; a];
    let mut all_degenerate = true;
    for i in 0..a {
        let mut d_plus = 0.0;
        let mut d_minus = 0.0;
        for j in 0..c {
            d_plus += (weighted[(i, j)] - ideal[j]).powi(2);
            d_minus += (weighted[(i, j)] - anti[j]).powi(2);
        }
        let d_plus = d_plus.sqrt();
        let d_minus = d_minus.sqrt();
        if d_plus + d_minus == 0.0 {
            // this row *is* both the ideal and the anti-ideal
            scores[i] = 0.5;
        } else {
            all_degenerate = false;
            scores[i] = d_minus / (d_plus + d_minus);
        }
    }
    if all_degenerate {
        warnings.push("all alternatives identical: universal tie at rank 1".into());
    }
    let ranks = ranks_from_scores(&scores, true)?;
    let mut all_warn = tie_warnings(&ranks);
    warnings.append(&mut all_warn);
    Ok(MethodResult {
        method: Method::Topsis,
        scores,
        ranks,
        vikor: None,
        warnings,
    })
}

/// Compromise ranking: best/worst per criterion define normalized regret
/// terms, aggregated into group utility S, max regret R, and the index
/// Q = v (S - S*)/(S- - S*) + (1-v)(R - R*)/(R- - R*). Lower Q is better.
pub fn vikor_rank(dm: &DecisionMatrix, v: f64) -> Result<MethodResult, McdmError> {
    if !(0.0..=1.0).contains(&v) {
        return Err(McdmError::BadVikorWeight(v));
    }
    let a = dm.n_alternatives();
    let c = dm.n_criteria();
    let mut warnings = Vec::new();

    let mut best = vec![0.0; c];
    let mut worst = vec![0.0; c];
    for j in 0..c {
        let column: Vec<f64> = dm.values.column(j).iter().copied().collect();
        let max = column.iter().cloned().fold(f64::MIN, f64::max);
        let min = column.iter().cloned().fold(f64::MAX, f64::min);
        match dm.criteria[j].direction {
            Direction::Benefit => {
                best[j] = max;
                worst[j] = min;
            }
            Direction::Cost => {
                best[j] = min;
                worst[j] = max;
            }
        }
        if best[j] == worst[j] {
            warnings.push(format!(
                "criterion {} is constant and contributes nothing",
                dm.criteria[j].name
            ));
        }
    }

    let mut s = vec![0.0f64; a];
    let mut r = vec![0.0f64; a];
    for i in 0..a {
        for j in 0..c {
            let span = best[j] - worst[j];
            if span == 0.0 {
                continue;
            }
            let term = dm.criteria[j].weight * (best[j] - dm.values[(i, j)]) / span;
            s[i] += term;
            r[i] = r[i].max(term);
        }
    }

    let s_best = s.iter().cloned().fold(f64::MAX, f64::min);
    let s_worst = s.iter().cloned().fold(f64::MIN, f64::max);
    let r_best = r.iter().cloned().fold(f64::MAX, f64::min);
    let r_worst = r.iter().cloned().fold(f64::MIN, f64::max);

    let q: Vec<f64> = (0..a)
        .map(|i| {
            let s_term = if s_worst > s_best {
                (s[i] - s_best) / (s_worst - s_best)
            } else {
                0.0
            };
            let r_term = if r_worst > r_best {
                (r[i] - r_best) / (r_worst - r_best)
            } else {
                0.0
            };
            v * s_term + (1.0 - v) * r_term
        })
        .collect();

    if q.iter().all(|&x| x == 0.0) {
        warnings.push("all alternatives identical: universal tie at rank 1".into());
    }

    let ranks = ranks_from_scores(&q, false)?;
    let s_ranks = ranks_from_scores(&s, false)?;
    let r_ranks = ranks_from_scores(&r, false)?;

    let mut sorted_q = q.clone();
    sorted_q.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let acceptable_advantage = if a >= 2 {
        sorted_q[1] - sorted_q[0] >= 1.0 / (a as f64 - 1.0)
    } else {
        true
    };
    let q_best = ranks
        .competition
        .iter()
        .position(|&rank| rank == 1)
        .expect("some alternative ranks first");
    let acceptable_stability =
        s_ranks.competition[q_best] == 1 || r_ranks.competition[q_best] == 1;

    let mut all_warn = tie_warnings(&ranks);
    warnings.append(&mut all_warn);
    Ok(MethodResult {
        method: Method::Vikor,
        scores: q.clone(),
        ranks,
        vikor: Some(VikorDiagnostics {
            s,
            r,
            q,
            acceptable_advantage,
            acceptable_stability,
        }),
        warnings,
    })
}

fn tie_warnings(ranks: &RankVector) -> Vec<String> {
    ranks
        .ties
        .iter()
        .map(|group| format!("tie among alternatives {group:?} broken by index"))
        .collect()
}
