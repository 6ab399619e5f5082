//! Rank distances over total orders.

use super::{is_permutation, AggError};

/// A labeled total-order ranking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ranking {
    pub labels: Vec<String>,
    /// ranks[i] is the rank (1 = best) of labels[i].
    pub ranks: Vec<usize>,
}

impl Ranking {
    pub fn new(labels: Vec<String>, ranks: Vec<usize>) -> Result<Self, AggError> {
        if !is_permutation(&ranks, labels.len()) {
            return Err(AggError::NotAPermutation(0));
        }
        Ok(Self { labels, ranks })
    }
}

pub(crate) fn footrule_raw(a: &[usize], b: &[usize]) -> u64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| x.abs_diff(y) as u64)
        .sum()
}

pub(crate) fn kendall_raw(a: &[usize], b: &[usize]) -> u64 {
    let n = a.len();
    let mut discordant = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let da = a[i] as i64 - a[j] as i64;
            let db = b[i] as i64 - b[j] as i64;
            if da * db < 0 {
                discordant += 1;
            }
        }
    }
    discordant
}

fn check_pair(a: &Ranking, b: &Ranking) -> Result<(), AggError> {
    if a.labels != b.labels {
        return Err(AggError::LabelMismatch);
    }
    Ok(())
}

/// Spearman footrule: sum over items of |rank_a - rank_b|.
pub fn footrule_distance(a: &Ranking, b: &Ranking) -> Result<u64, AggError> {
    check_pair(a, b)?;
    Ok(footrule_raw(&a.ranks, &b.ranks))
}

/// Kendall tau distance: number of discordant item pairs.
pub fn kendall_distance(a: &Ranking, b: &Ranking) -> Result<u64, AggError> {
    check_pair(a, b)?;
    Ok(kendall_raw(&a.ranks, &b.ranks))
}
