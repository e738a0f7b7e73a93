//! Latin hypercube designs and simplex-lattice weight vectors.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Component};

/// Lifted value for zero weight components.
pub const WEIGHT_FLOOR: f64 = 1e-6;

/// `n_samples x n_dims` design in `[0, 1)` with one point per stratum in every column.
pub fn latin_hypercube(n_samples: usize, n_dims: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = rng::stream(seed, Component::Sampler, 0);
    let mut design = vec![vec![0.0; n_dims]; n_samples];
    let mut strata: Vec<usize> = (0..n_samples).collect();
    for d in 0..n_dims {
        strata.shuffle(&mut rng);
        for (row, &s) in design.iter_mut().zip(&strata) {
            let jitter: f64 = rng.random();
            // stays below the stratum's upper edge even after rounding
            row[d] = ((s as f64 + jitter) / n_samples as f64).min((s + 1) as f64 / n_samples as f64 - f64::EPSILON);
        }
    }
    design
}

/// Simplex-lattice weight vectors with the minimum angle from each vector to
/// any other.
/// Additive-recurrence increments for a `d`-dimensional Kronecker sequence
/// built on the generalized golden ratio (the positive root of
/// `x^(d+1) = x + 1`).
pub fn kronecker_alphas(d: usize) -> Vec<f64> {
    let mut phi = 2.0f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (d as f64 + 1.0));
    }
    (1..=d).map(|j| (1.0 / phi.powi(j as i32)).fract()).collect()
}

/// First `m` points of the Kronecker sequence in `[0, 1)^d`, started at 1/2.
pub fn kronecker_sequence(m: usize, d: usize) -> Vec<Vec<f64>> {
    let alphas = kronecker_alphas(d);
    let mut u = vec![0.5; d];
    (0..m)
        .map(|_| {
            for (v, a) in u.iter_mut().zip(&alphas) {
                *v = (*v + a).fract();
            }
            u.clone()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVectorSet {
    pub vectors: Vec<Vec<f64>>,
    /// Integer lattice coordinates; each row sums to `h`.
    pub counts: Vec<Vec<usize>>,
    pub h: usize,
    pub gamma: Vec<f64>,
}

impl WeightVectorSet {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn k(&self) -> usize {
        self.vectors.first().map_or(0, |v| v.len())
    }
}

pub fn binomial(n: usize, r: usize) -> usize {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Angle in radians, computed as `2 atan2(|u - v|, |u + v|)` on the unit
/// vectors, which stays accurate near 0 and pi where `acos` does not.
pub fn angle_between(a: &[f64], b: &[f64]) -> f64 {
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    let (mut diff, mut sum) = (0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (u, v) = (x / na, y / nb);
        diff += (u - v) * (u - v);
        sum += (u + v) * (u + v);
    }
    2.0 * diff.sqrt().atan2(sum.sqrt())
}

fn compositions(k: usize, h: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if prefix.len() == k - 1 {
        let used: usize = prefix.iter().sum();
        let mut v = prefix.clone();
        v.push(h - used);
        out.push(v);
        return;
    }
    let used: usize = prefix.iter().sum();
    for i in (0..=(h - used)).rev() {
        prefix.push(i);
        compositions(k, h, prefix, out);
        prefix.pop();
    }
}

/// All vectors `(i_1/H, ..., i_k/H)` with nonnegative integers summing to `H`.
pub fn simplex_lattice(k: usize, h: usize) -> Result<WeightVectorSet> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("lattice needs k >= 2, got {k}")));
    }
    if h < 1 {
        return Err(Error::InvalidParameter("lattice resolution H must be >= 1".into()));
    }
    let mut counts = Vec::with_capacity(binomial(h + k - 1, k - 1));
    compositions(k, h, &mut Vec::with_capacity(k), &mut counts);
    counts.reverse();
    let vectors: Vec<Vec<f64>> = counts
        .iter()
        .map(|c| c.iter().map(|&i| i as f64 / h as f64).collect())
        .collect();
    let gamma = vectors
        .iter()
        .enumerate()
        .map(|(i, v)| {
            vectors
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, u)| angle_between(v, u))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    Ok(WeightVectorSet {
        vectors,
        counts,
        h,
        gamma,
    })
}

/// Lattice resolution per objective count, keeping the set at 100 to 220 vectors.
pub fn default_lattice_h(k: usize) -> usize {
    match k {
        2 => 99,
        3 => 13,
        5 => 6,
        10 => 3,
        _ => {
            let mut h = 1;
            while binomial(h + 1 + k - 1, k - 1) <= 220 {
                h += 1;
            }
            h
        }
    }
}

/// Initial design size: `11n - 1`, capped at half the budget.
pub fn initial_design_size(n: usize, fe_max: usize) -> usize {
    (11 * n - 1).min(fe_max / 2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PickedWeight {
    pub index: usize,
    pub w: Vec<f64>,
    /// Minimum angle from the lattice vector to any other in the set.
    pub gamma: f64,
}

/// Replaces zero components with [`WEIGHT_FLOOR`] and renormalizes to sum 1.
pub fn lift_weight(w: &[f64]) -> Vec<f64> {
    let lifted: Vec<f64> = w.iter().map(|&v| v.max(WEIGHT_FLOOR)).collect();
    let s: f64 = lifted.iter().sum();
    lifted.into_iter().map(|v| v / s).collect()
}

/// Uniformly random lattice vector, deterministic in `(seed, iteration)`.
pub fn pick_weight(set: &WeightVectorSet, iteration: u64, seed: u64, lift_zeros: bool) -> PickedWeight {
    assert!(!set.is_empty(), "weight vector set is empty");
    let mut rng = rng::stream(seed, Component::Weight, iteration);
    let index = rng.random_range(0..set.len());
    let raw = &set.vectors[index];
    PickedWeight {
        index,
        w: if lift_zeros { lift_weight(raw) } else { raw.clone() },
        gamma: set.gamma[index],
    }
}
