//! Wilcoxon rank-sum test and per-instance win counting.

use std::collections::BTreeMap;

use log::info;
use serde::{Deserialize, Serialize};

use super::campaign::CampaignCell;
use crate::acquisition::normal_cdf;
use crate::error::{Error, Result};

/// Below this size in the smaller sample, p-values come from the exact
/// null distribution.
pub const EXACT_LIMIT: usize = 8;
/// Largest combined sample size enumerated exactly.
const EXACT_MAX_TOTAL: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankSum {
    /// Mann–Whitney `U` of the first sample: its rank sum minus `n(n+1)/2`.
    pub u: f64,
    pub p_two_sided: f64,
    /// Evidence that the first sample tends to be smaller.
    pub p_less: f64,
    /// Evidence that the first sample tends to be larger.
    pub p_greater: f64,
    pub exact: bool,
}

/// Ranks of the pooled sample with ties sharing their mean rank, doubled so
/// they stay integers. Also returns the tie-group sizes.
fn doubled_midranks(pooled: &[f64]) -> (Vec<u64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&a, &b| pooled[a].total_cmp(&pooled[b]));
    let mut ranks = vec![0u64; pooled.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && pooled[order[j + 1]] == pooled[order[i]] {
            j += 1;
        }
        // ranks i+1..=j+1 averaged, doubled
        let r2 = (i + 1 + j + 1) as u64;
        for &o in &order[i..=j] {
            ranks[o] = r2;
        }
        ties.push(j - i + 1);
        i = j + 1;
    }
    (ranks, ties)
}

/// Counts of subsets of size `na` by doubled rank sum.
fn exact_distribution(ranks: &[u64], na: usize) -> Vec<f64> {
    let total: u64 = ranks.iter().sum();
    let mut dp = vec![vec![0.0f64; total as usize + 1]; na + 1];
    dp[0][0] = 1.0;
    for &r in ranks {
        let r = r as usize;
        for j in (1..=na).rev() {
            let (lo, hi) = dp.split_at_mut(j);
            let prev = &lo[j - 1];
            let cur = &mut hi[0];
            for s in (r..cur.len()).rev() {
                cur[s] += prev[s - r];
            }
        }
    }
    dp.swap_remove(na)
}

/// Two-sample Wilcoxon rank-sum test with midranks for ties.
///
/// Exact when the smaller sample has fewer than [`EXACT_LIMIT`] values,
/// otherwise the normal approximation with tie-corrected variance and a
/// continuity correction of 1/2.
pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64]) -> Result<RankSum> {
    if a.len() < 3 || b.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "rank-sum test needs at least 3 values per sample, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return Err(Error::InvalidParameter("NaN in rank-sum sample".into()));
    }
    let (na, nb) = (a.len(), b.len());
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, ties) = doubled_midranks(&pooled);
    let s2: u64 = ranks[..na].iter().sum();
    let offset2 = (na * (na + 1)) as f64;
    let u = (s2 as f64 - offset2) / 2.0;

    if na.min(nb) < EXACT_LIMIT && na + nb <= EXACT_MAX_TOTAL {
        let counts = exact_distribution(&ranks, na);
        let total: f64 = counts.iter().sum();
        let s = s2 as usize;
        let p_less = counts[..=s].iter().sum::<f64>() / total;
        let p_greater = counts[s..].iter().sum::<f64>() / total;
        return Ok(RankSum {
            u,
            p_two_sided: (2.0 * p_less.min(p_greater)).min(1.0),
            p_less,
            p_greater,
            exact: true,
        });
    }

    let n = (na + nb) as f64;
    let mean = (na * nb) as f64 / 2.0;
    let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / (n * (n - 1.0));
    let var = (na * nb) as f64 / 12.0 * ((n + 1.0) - tie_term);
    if var <= 0.0 {
        return Ok(RankSum {
            u,
            p_two_sided: 1.0,
            p_less: 1.0,
            p_greater: 1.0,
            exact: false,
        });
    }
    let sd = var.sqrt();
    let z = ((u - mean).abs() - 0.5).max(0.0) / sd;
    Ok(RankSum {
        u,
        p_two_sided: libm::erfc(z / std::f64::consts::SQRT_2).min(1.0),
        p_less: normal_cdf((u - mean + 0.5) / sd),
        p_greater: 1.0 - normal_cdf((u - mean - 0.5) / sd),
        exact: false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceOutcome {
    pub instance: String,
    pub k: usize,
    pub winner: String,
    /// Scalarizers not significantly worse than the winner, winner included.
    pub bold: Vec<String>,
    pub worst: String,
    /// Set when the winner shared its mean and SD with another scalarizer.
    pub tie: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WinSummary {
    pub alpha: f64,
    pub wins: BTreeMap<String, usize>,
    pub wins_by_k: BTreeMap<usize, BTreeMap<String, usize>>,
    pub instances: Vec<InstanceOutcome>,
}

/// Best mean IGD wins each instance; ties go to the lower SD, then to the
/// earlier scalarizer. Cells are grouped by `(instance, k)` in order of
/// first appearance.
pub fn aggregate_wins(cells: &[CampaignCell], alpha: f64) -> Result<WinSummary> {
    if cells.is_empty() {
        return Err(Error::Empty("campaign cells"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("significance level {alpha} outside (0, 1)")));
    }
    let mut groups: Vec<((String, usize), Vec<&CampaignCell>)> = Vec::new();
    for c in cells {
        let key = (c.instance.clone(), c.k);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, g)) => g.push(c),
            None => groups.push((key, vec![c])),
        }
    }
    let mut summary = WinSummary {
        alpha,
        wins: BTreeMap::new(),
        wins_by_k: BTreeMap::new(),
        instances: Vec::new(),
    };
    for c in cells {
        summary.wins.entry(c.scalarizer.clone()).or_insert(0);
        summary
            .wins_by_k
            .entry(c.k)
            .or_default()
            .entry(c.scalarizer.clone())
            .or_insert(0);
    }
    for ((instance, k), group) in groups {
        let key = |c: &CampaignCell| (c.mean_igd, c.sd_igd);
        let lex = |a: (f64, f64), b: (f64, f64)| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1));
        let mut best = 0;
        let mut worst = 0;
        for (i, c) in group.iter().enumerate() {
            if lex(key(c), key(group[best])).is_lt() {
                best = i;
            }
            if lex(key(c), key(group[worst])).is_gt() {
                worst = i;
            }
        }
        let winner = group[best];
        let tie = group
            .iter()
            .enumerate()
            .any(|(i, c)| i != best && lex(key(c), key(winner)).is_eq());
        if tie {
            info!("{instance} k={k}: tie for best, awarded to {}", winner.scalarizer);
        }
        let mut bold = Vec::new();
        for (i, c) in group.iter().enumerate() {
            let similar = i == best
                || match wilcoxon_rank_sum(&c.igd, &winner.igd) {
                    Ok(r) => r.p_two_sided >= alpha,
                    Err(_) => false,
                };
            if similar {
                bold.push(c.scalarizer.clone());
            }
        }
        *summary.wins.get_mut(&winner.scalarizer).expect("seeded above") += 1;
        *summary
            .wins_by_k
            .get_mut(&k)
            .and_then(|m| m.get_mut(&winner.scalarizer))
            .expect("seeded above") += 1;
        summary.instances.push(InstanceOutcome {
            instance,
            k,
            winner: winner.scalarizer.clone(),
            bold,
            worst: group[worst].scalarizer.clone(),
            tie,
        });
    }
    Ok(summary)
}
