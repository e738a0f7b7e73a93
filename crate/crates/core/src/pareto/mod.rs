//! Pareto dominance, nondominated sorting, hypervolume and IGD.
//! All objectives are minimized.

mod hypervolume;

pub use hypervolume::{
    hypervolume, hypervolume_estimate, hypervolume_exact, hypervolume_qmc, HypervolumeEstimate,
    EXACT_MAX_OBJECTIVES, EXACT_MAX_POINTS, QMC_SAMPLES,
};

use serde::{Deserialize, Serialize};

use crate::domain::{Archive, EvaluatedSample};
use crate::error::{check_len, Error, Result};

/// `a` is no worse than `b` everywhere and strictly better somewhere.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    debug_assert_eq!(a.len(), b.len());
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly = true;
        }
    }
    strictly
}

/// Ranked fronts `P_1, P_2, ...` of a point set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrontPartition {
    /// Indices of each front in input order.
    pub fronts: Vec<Vec<usize>>,
    /// 1-based front rank of each input row.
    pub rank: Vec<usize>,
}

impl FrontPartition {
    pub fn first(&self) -> &[usize] {
        self.fronts.first().map(|v| v.as_slice()).unwrap_or(&[])
    }
}

/// Fast nondominated sorting with domination counters.
pub fn nondominated_sort(rows: &[Vec<f64>]) -> Result<FrontPartition> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::Empty("objective matrix"));
    }
    let k = rows[0].len();
    for r in rows {
        check_len(k, r.len())?;
    }
    let mut dominated_by_count = vec![0usize; n];
    let mut dominates_list: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if dominates(&rows[i], &rows[j]) {
                dominates_list[i].push(j);
                dominated_by_count[j] += 1;
            } else if dominates(&rows[j], &rows[i]) {
                dominates_list[j].push(i);
                dominated_by_count[i] += 1;
            }
        }
    }
    let mut rank = vec![0usize; n];
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by_count[i] == 0).collect();
    let mut level = 1;
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            rank[i] = level;
            for &j in &dominates_list[i] {
                dominated_by_count[j] -= 1;
                if dominated_by_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
        level += 1;
    }
    Ok(FrontPartition { fronts, rank })
}

/// Indices of the nondominated rows, in input order.
pub fn nondominated_indices(rows: &[Vec<f64>]) -> Vec<usize> {
    (0..rows.len())
        .filter(|&i| !rows.iter().any(|other| dominates(other, &rows[i])))
        .collect()
}

/// The rank-1 samples of an archive by raw objectives.
pub fn nondominated_subset(archive: &Archive) -> Result<Vec<EvaluatedSample>> {
    if archive.is_empty() {
        return Err(Error::Empty("archive"));
    }
    let rows = archive.objectives();
    Ok(nondominated_indices(&rows)
        .into_iter()
        .map(|i| archive.samples()[i].clone())
        .collect())
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Inverted generational distance: mean over the reference sample of the
/// Euclidean distance to the nearest approximation point.
pub fn igd(approximation: &[Vec<f64>], reference: &[Vec<f64>]) -> Result<f64> {
    if approximation.is_empty() {
        return Err(Error::Empty("approximation set"));
    }
    if reference.is_empty() {
        return Err(Error::Empty("reference front"));
    }
    let k = reference[0].len();
    for row in approximation.iter().chain(reference) {
        check_len(k, row.len())?;
    }
    let total: f64 = reference
        .iter()
        .map(|r| {
            approximation
                .iter()
                .map(|a| euclidean(r, a))
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    Ok(total / reference.len() as f64)
}
