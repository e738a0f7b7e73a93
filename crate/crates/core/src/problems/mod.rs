//! DTLZ and WFG benchmark problems with reference Pareto-front samplers.

mod dtlz;
mod wfg;

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::domain::ProblemSpec;
use crate::error::{check_len, Error, Result};
use crate::io::{objective_header, read_matrix_csv, write_matrix_csv};
use crate::sampling::kronecker_sequence;

/// Environment variable naming the reference-front cache directory.
pub const CACHE_ENV: &str = "SCALBO_CACHE";

/// Anything the optimization loop can evaluate.
pub trait Problem: Sync {
    fn spec(&self) -> ProblemSpec;
    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Suite {
    #[serde(rename = "DTLZ")]
    Dtlz,
    #[serde(rename = "WFG")]
    Wfg,
}

impl Suite {
    fn max_index(self) -> usize {
        match self {
            Suite::Dtlz => 7,
            Suite::Wfg => 9,
        }
    }
}

/// One DTLZ or WFG problem at a fixed objective count.
///
/// DTLZ uses `n = k + 4`. WFG uses `d = 4` position parameters for two
/// objectives and `d = 2 (k - 1)` otherwise, with `l = 4` distance
/// parameters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkInstance {
    pub suite: Suite,
    pub index: usize,
    pub k: usize,
    pub n: usize,
    /// WFG position parameters (`k - 1` for DTLZ).
    pub d: usize,
    /// WFG distance parameters (`n - k + 1` for DTLZ).
    pub l: usize,
}

impl BenchmarkInstance {
    pub fn new(suite: Suite, index: usize, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParameter(format!("need at least 2 objectives, got {k}")));
        }
        let (n, d, l) = match suite {
            Suite::Dtlz => (k + 4, k - 1, 5),
            Suite::Wfg => {
                let d = if k == 2 { 4 } else { 2 * (k - 1) };
                (d + 4, d, 4)
            }
        };
        let inst = BenchmarkInstance { suite, index, k, n, d, l };
        inst.validate()?;
        Ok(inst)
    }

    pub fn dtlz(index: usize, k: usize) -> Result<Self> {
        Self::new(Suite::Dtlz, index, k)
    }

    pub fn wfg(index: usize, k: usize) -> Result<Self> {
        Self::new(Suite::Wfg, index, k)
    }

    /// Parses names like `DTLZ2` or `wfg4`.
    pub fn from_name(name: &str, k: usize) -> Result<Self> {
        let upper = name.to_ascii_uppercase();
        let (suite, rest) = if let Some(r) = upper.strip_prefix("DTLZ") {
            (Suite::Dtlz, r)
        } else if let Some(r) = upper.strip_prefix("WFG") {
            (Suite::Wfg, r)
        } else {
            return Err(Error::Parse(format!("unknown problem '{name}'")));
        };
        let index = rest
            .parse()
            .map_err(|_| Error::Parse(format!("unknown problem '{name}'")))?;
        Self::new(suite, index, k)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=self.suite.max_index()).contains(&self.index) {
            return Err(Error::InvalidParameter(format!("no problem {self}")));
        }
        if self.k < 2 || self.d + self.l != self.n {
            return Err(Error::InvalidParameter(format!("inconsistent dimensions for {self}")));
        }
        match self.suite {
            Suite::Dtlz if self.d != self.k - 1 => {
                Err(Error::InvalidParameter("DTLZ needs k - 1 position variables".into()))
            }
            Suite::Wfg if self.d % (self.k - 1) != 0 || self.l % 2 != 0 || self.l == 0 => Err(
                Error::InvalidParameter("WFG needs d divisible by k - 1 and an even, positive l".into()),
            ),
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> String {
        self.to_string()
    }

    pub fn lower(&self) -> Vec<f64> {
        vec![0.0; self.n]
    }

    pub fn upper(&self) -> Vec<f64> {
        match self.suite {
            Suite::Dtlz => vec![1.0; self.n],
            Suite::Wfg => (1..=self.n).map(|i| 2.0 * i as f64).collect(),
        }
    }

    /// Reference point for hypervolume: fixed multiples of the ones vector
    /// for DTLZ, twice the front's nadir for WFG.
    pub fn hv_reference(&self) -> Vec<f64> {
        match self.suite {
            Suite::Dtlz => {
                let c = [400.0, 1.5, 900.0, 2.0, 1.5, 6.0, 5.0][self.index - 1];
                vec![c; self.k]
            }
            Suite::Wfg => nadir_of_front(self).into_iter().map(|v| 2.0 * v).collect(),
        }
    }
}

impl fmt::Display for BenchmarkInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.suite {
            Suite::Dtlz => "DTLZ",
            Suite::Wfg => "WFG",
        };
        write!(f, "{s}{}", self.index)
    }
}

impl Problem for BenchmarkInstance {
    fn spec(&self) -> ProblemSpec {
        ProblemSpec {
            name: self.name(),
            k: self.k,
            n: self.n,
            lower: self.lower(),
            upper: self.upper(),
        }
    }

    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n, x.len())?;
        self.spec().check_bounds(x)?;
        let f = match self.suite {
            Suite::Dtlz => dtlz::evaluate(self.index, self.k, x),
            Suite::Wfg => wfg::evaluate(self.index, self.k, self.d, x),
        };
        if let Some(v) = f.iter().find(|v| !v.is_finite()) {
            return Err(Error::Overflow(*v));
        }
        Ok(f)
    }
}

/// Number of reference-front points used for IGD by default.
pub fn default_front_size(k: usize) -> usize {
    if k <= 3 {
        10_000
    } else {
        50_000
    }
}

/// Points on the unit simplex: evenly spaced for two objectives, otherwise
/// Kronecker points mapped through sorted spacings.
fn simplex_points(m: usize, k: usize) -> Vec<Vec<f64>> {
    if k == 2 {
        return (0..m)
            .map(|i| {
                let t = if m == 1 { 0.5 } else { i as f64 / (m - 1) as f64 };
                vec![t, 1.0 - t]
            })
            .collect();
    }
    kronecker_sequence(m, k - 1)
        .into_iter()
        .map(|mut u| {
            u.sort_by(f64::total_cmp);
            let mut w = Vec::with_capacity(k);
            let mut prev = 0.0;
            for v in u {
                w.push(v - prev);
                prev = v;
            }
            w.push(1.0 - prev);
            w
        })
        .collect()
}

/// Unit directions in the positive orthant. For two objectives these are
/// evenly spaced in angle.
fn sphere_points(m: usize, k: usize) -> Vec<Vec<f64>> {
    if k == 2 {
        return (0..m)
            .map(|i| {
                let t = if m == 1 { 0.5 } else { i as f64 / (m - 1) as f64 };
                let a = t * FRAC_PI_2;
                vec![a.cos(), a.sin()]
            })
            .collect();
    }
    simplex_points(m, k)
        .into_iter()
        .map(|w| {
            let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
            w.into_iter().map(|v| v / norm).collect()
        })
        .collect()
}

fn even(m: usize) -> impl Iterator<Item = f64> {
    (0..m).map(move |i| if m == 1 { 0.5 } else { i as f64 / (m - 1) as f64 })
}

/// Subintervals of `[0, 1]` where `phi(t)` exceeds `phi(s)` for every
/// `s < t`, found on a fine grid. A coordinate outside this set can be
/// lowered without lowering `phi`.
fn record_intervals(phi: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
    const GRID: usize = 200_000;
    let mut intervals: Vec<(f64, f64)> = Vec::new();
    let mut best = f64::NEG_INFINITY;
    let mut open: Option<f64> = None;
    for i in 0..=GRID {
        let t = i as f64 / GRID as f64;
        let v = phi(t);
        if v > best {
            best = v;
            if open.is_none() {
                open = Some(t);
            }
        } else if let Some(s) = open.take() {
            intervals.push((s, (i - 1) as f64 / GRID as f64));
        }
    }
    if let Some(s) = open {
        intervals.push((s, 1.0));
    }
    intervals
}

/// Maps `u` in `[0, 1]` onto the union of `intervals`, preserving measure.
fn map_into(intervals: &[(f64, f64)], u: f64) -> f64 {
    let total: f64 = intervals.iter().map(|(a, b)| b - a).sum();
    let mut rem = u * total;
    for &(a, b) in intervals {
        if rem <= b - a {
            return a + rem;
        }
        rem -= b - a;
    }
    intervals.last().map_or(u, |iv| iv.1)
}

/// `m` points on the Pareto front of `inst`, sampled analytically.
///
/// Spheres and simplices use low-discrepancy directions. Disconnected
/// fronts (DTLZ7, WFG2) restrict the coordinates driving the disconnection
/// to their nondominated intervals. WFG1 and WFG3 evaluate the shape
/// functions at zero distance, which is where distance parameters sit at
/// 0.35 of their range.
pub fn reference_front(inst: &BenchmarkInstance, m: usize) -> Vec<Vec<f64>> {
    let k = inst.k;
    match (inst.suite, inst.index) {
        (Suite::Dtlz, 1) => simplex_points(m, k)
            .into_iter()
            .map(|w| w.into_iter().map(|v| 0.5 * v).collect())
            .collect(),
        (Suite::Dtlz, 2..=4) => sphere_points(m, k),
        (Suite::Dtlz, 5 | 6) => {
            if k == 2 {
                return sphere_points(m, k);
            }
            even(m)
                .map(|t| {
                    let mut pos = vec![0.5; k - 1];
                    pos[0] = t;
                    dtlz::spherical(&dtlz::degenerate_angles(&pos, 0.0), k, 0.0)
                })
                .collect()
        }
        (Suite::Dtlz, _) => {
            let iv = record_intervals(dtlz::dtlz7_term);
            let pts: Vec<Vec<f64>> = if k == 2 {
                even(m).map(|t| vec![t]).collect()
            } else {
                kronecker_sequence(m, k - 1)
            };
            pts.into_iter()
                .map(|u| {
                    let mut f: Vec<f64> = u.iter().map(|&v| map_into(&iv, v)).collect();
                    let last = 2.0 * k as f64 - f.iter().map(|&t| dtlz::dtlz7_term(t)).sum::<f64>();
                    f.push(last);
                    f
                })
                .collect()
        }
        (Suite::Wfg, idx) => {
            let shape = wfg::shape_of(idx);
            if shape == wfg::Shape::Concave {
                return sphere_points(m, k)
                    .into_iter()
                    .map(|p| p.iter().enumerate().map(|(i, v)| 2.0 * (i + 1) as f64 * v).collect())
                    .collect();
            }
            let params: Vec<Vec<f64>> = match shape {
                wfg::Shape::Linear => even(m)
                    .map(|t| {
                        let mut x = vec![0.5; k - 1];
                        x[0] = t;
                        x
                    })
                    .collect(),
                _ if k == 2 => even(m).map(|t| vec![t]).collect(),
                _ => kronecker_sequence(m, k - 1),
            };
            let disc = (shape == wfg::Shape::ConvexDisc).then(|| record_intervals(|t| -wfg::disc(t)));
            params
                .into_iter()
                .map(|mut x| {
                    if let Some(iv) = &disc {
                        x[0] = map_into(iv, x[0]);
                    }
                    wfg::shape_objectives(shape, &x, 0.0)
                })
                .collect()
        }
    }
}

/// Componentwise maximum over a dense reference-front sample.
pub fn nadir_of_front(inst: &BenchmarkInstance) -> Vec<f64> {
    let front = reference_front(inst, default_front_size(inst.k));
    let mut nadir = vec![f64::NEG_INFINITY; inst.k];
    for p in &front {
        for (n, v) in nadir.iter_mut().zip(p) {
            *n = n.max(*v);
        }
    }
    nadir
}

/// Reads `SCALBO_CACHE`.
pub fn cache_dir_from_env() -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from)
}

pub fn front_cache_file(inst: &BenchmarkInstance, m: usize) -> String {
    format!("front_{}_k{}_m{}.csv", inst.name().to_ascii_lowercase(), inst.k, m)
}

/// [`reference_front`] backed by a CSV cache in `dir`, when one is given.
pub fn reference_front_cached(inst: &BenchmarkInstance, m: usize, dir: Option<&Path>) -> Result<Vec<Vec<f64>>> {
    let Some(dir) = dir else {
        return Ok(reference_front(inst, m));
    };
    let path = dir.join(front_cache_file(inst, m));
    if path.exists() {
        let rows = read_matrix_csv(&path)?;
        if rows.iter().all(|r| r.len() == inst.k) && !rows.is_empty() {
            return Ok(rows);
        }
        log::warn!("ignoring malformed front cache {}", path.display());
    }
    let front = reference_front(inst, m);
    std::fs::create_dir_all(dir)?;
    write_matrix_csv(&path, &objective_header(inst.k), &front)?;
    Ok(front)
}

/// All benchmark instances at objective count `k`: DTLZ1–7 then WFG1–9.
pub fn all_instances(k: usize) -> Result<Vec<BenchmarkInstance>> {
    let mut out = Vec::with_capacity(16);
    for i in 1..=7 {
        out.push(BenchmarkInstance::dtlz(i, k)?);
    }
    for i in 1..=9 {
        out.push(BenchmarkInstance::wfg(i, k)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensioning() {
        for (k, d, n) in [(2, 4, 8), (3, 4, 8), (5, 8, 12), (10, 18, 22)] {
            let w = BenchmarkInstance::wfg(1, k).unwrap();
            assert_eq!((w.d, w.l, w.n), (d, 4, n));
        }
        assert_eq!(BenchmarkInstance::dtlz(1, 2).unwrap().n, 6);
        assert_eq!(BenchmarkInstance::dtlz(3, 10).unwrap().n, 14);
        assert!(BenchmarkInstance::dtlz(8, 2).is_err());
        assert!(BenchmarkInstance::wfg(0, 2).is_err());
        assert!(BenchmarkInstance::wfg(1, 1).is_err());
    }

    #[test]
    fn names_round_trip() {
        let i = BenchmarkInstance::from_name("wfg7", 3).unwrap();
        assert_eq!(i.name(), "WFG7");
        assert!(BenchmarkInstance::from_name("zdt1", 2).is_err());
    }

    #[test]
    fn record_intervals_of_monotone_function() {
        let iv = record_intervals(|t| t);
        assert_eq!(iv, vec![(0.0, 1.0)]);
        assert!((map_into(&iv, 0.3) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn dtlz7_intervals_match_known_breaks() {
        let iv = record_intervals(dtlz::dtlz7_term);
        assert_eq!(iv.len(), 2);
        assert!((iv[0].1 - 0.2514).abs() < 1e-3, "{iv:?}");
        assert!((iv[1].0 - 0.6316).abs() < 1e-3, "{iv:?}");
    }
}
