//! Scalarizers that score each point relative to the whole evaluated set.
//! All three are maximized.

use crate::error::{check_len, Error, Result};
use crate::pareto::{dominates, hypervolume, nondominated_sort};

fn check_rows(rows: &[Vec<f64>]) -> Result<usize> {
    let k = rows.first().ok_or(Error::Empty("objective matrix"))?.len();
    for r in rows {
        check_len(k, r.len())?;
    }
    Ok(k)
}

/// Hypervolume of each point together with the next-worse front. Points of
/// the last front get the hypervolume of their own box.
pub fn hypi_fitness(rows: &[Vec<f64>], reference: &[f64]) -> Result<Vec<f64>> {
    let k = check_rows(rows)?;
    check_len(k, reference.len())?;
    let partition = nondominated_sort(rows)?;
    let mut g = vec![0.0; rows.len()];
    for (level, front) in partition.fronts.iter().enumerate() {
        let next: Vec<Vec<f64>> = partition
            .fronts
            .get(level + 1)
            .map(|idx| idx.iter().map(|&i| rows[i].clone()).collect())
            .unwrap_or_default();
        for &i in front {
            let mut set = Vec::with_capacity(next.len() + 1);
            set.push(rows[i].clone());
            set.extend(next.iter().cloned());
            g[i] = hypervolume(&set, reference);
        }
    }
    Ok(g)
}

/// `1 - (rank - 1) / (|X| - 1)` where rank is one plus the number of
/// dominating points. A single point scores 1.
pub fn domrank_fitness(rows: &[Vec<f64>]) -> Result<Vec<f64>> {
    check_rows(rows)?;
    let n = rows.len();
    if n == 1 {
        return Ok(vec![1.0]);
    }
    Ok(rows
        .iter()
        .map(|x| {
            let dominators = rows.iter().filter(|o| dominates(o, x)).count();
            1.0 - dominators as f64 / (n - 1) as f64
        })
        .collect())
}

/// Minimum over first-front points `x'` of `sum_i f_i(x') - f_i(x)`.
pub fn msd_fitness(rows: &[Vec<f64>]) -> Result<Vec<f64>> {
    check_rows(rows)?;
    let partition = nondominated_sort(rows)?;
    let front_sums: Vec<f64> = partition
        .first()
        .iter()
        .map(|&i| rows[i].iter().sum())
        .collect();
    Ok(rows
        .iter()
        .map(|x| {
            let sx: f64 = x.iter().sum();
            front_sums
                .iter()
                .map(|s| s - sx)
                .fold(f64::INFINITY, f64::min)
        })
        .collect())
}
