//! Shared domain types: problem dimensions, the evaluation archive,
//! objective normalization and run-state bookkeeping.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

/// Box-constrained multiobjective problem dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub name: String,
    pub k: usize,
    pub n: usize,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl ProblemSpec {
    pub fn new(name: impl Into<String>, k: usize, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let spec = ProblemSpec {
            name: name.into(),
            k,
            n: lower.len(),
            lower,
            upper,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::InvalidParameter(format!("objective count k={} < 2", self.k)));
        }
        if self.n < 1 {
            return Err(Error::InvalidParameter("decision vector must have n >= 1".into()));
        }
        check_len(self.n, self.lower.len())?;
        check_len(self.n, self.upper.len())?;
        for (i, (lo, hi)) in self.lower.iter().zip(&self.upper).enumerate() {
            if !(lo < hi) {
                return Err(Error::InvalidParameter(format!(
                    "bounds of variable {i} are empty: [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.n
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
    }

    pub fn check_bounds(&self, x: &[f64]) -> Result<()> {
        check_len(self.n, x.len())?;
        for (index, (&value, (&lower, &upper))) in
            x.iter().zip(self.lower.iter().zip(&self.upper)).enumerate()
        {
            if !(value >= lower && value <= upper) {
                return Err(Error::OutOfBounds {
                    index,
                    value,
                    lower,
                    upper,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluatedSample {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    pub eval_index: usize,
}

/// Append-only record of every expensive evaluation of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Archive {
    pub problem: ProblemSpec,
    samples: Vec<EvaluatedSample>,
}

impl Archive {
    pub fn new(problem: ProblemSpec) -> Self {
        Archive {
            problem,
            samples: Vec::new(),
        }
    }

    /// Rebuilds an archive from serialized parts, re-checking every invariant.
    pub fn from_samples(problem: ProblemSpec, samples: Vec<EvaluatedSample>) -> Result<Self> {
        problem.validate()?;
        let mut archive = Archive::new(problem);
        for (i, s) in samples.into_iter().enumerate() {
            if s.eval_index != i {
                return Err(Error::InvalidParameter(format!(
                    "sample {i} carries eval_index {}",
                    s.eval_index
                )));
            }
            archive.push(s.x, s.f)?;
        }
        Ok(archive)
    }

    /// Appends an evaluation; returns its `eval_index`.
    pub fn push(&mut self, x: Vec<f64>, f: Vec<f64>) -> Result<usize> {
        check_len(self.problem.n, x.len())?;
        check_len(self.problem.k, f.len())?;
        let eval_index = self.samples.len();
        self.samples.push(EvaluatedSample { x, f, eval_index });
        Ok(eval_index)
    }

    pub fn samples(&self) -> &[EvaluatedSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn objectives(&self) -> Vec<Vec<f64>> {
        self.samples.iter().map(|s| s.f.clone()).collect()
    }

    pub fn decisions(&self) -> Vec<Vec<f64>> {
        self.samples.iter().map(|s| s.x.clone()).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(crate::io::to_json_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            problem: ProblemSpec,
            samples: Vec<EvaluatedSample>,
        }
        let raw: Raw = serde_json::from_str(text)?;
        Archive::from_samples(raw.problem, raw.samples)
    }
}

/// Empirical ideal (componentwise minimum) and nadir (componentwise maximum).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationBounds {
    pub ideal: Vec<f64>,
    pub nadir: Vec<f64>,
}

impl NormalizationBounds {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let first = rows.first().ok_or(Error::Empty("objective matrix"))?;
        let k = first.len();
        let mut ideal = first.clone();
        let mut nadir = first.clone();
        for row in &rows[1..] {
            check_len(k, row.len())?;
            for i in 0..k {
                ideal[i] = ideal[i].min(row[i]);
                nadir[i] = nadir[i].max(row[i]);
            }
        }
        Ok(NormalizationBounds { ideal, nadir })
    }

    pub fn dim(&self) -> usize {
        self.ideal.len()
    }

    pub fn is_degenerate(&self, i: usize) -> bool {
        !(self.nadir[i] > self.ideal[i])
    }

    /// Maps one objective vector into the unit box; degenerate columns map to 0.
    pub fn normalize(&self, f: &[f64]) -> Vec<f64> {
        f.iter()
            .enumerate()
            .map(|(i, &v)| {
                if self.is_degenerate(i) {
                    0.0
                } else {
                    (v - self.ideal[i]) / (self.nadir[i] - self.ideal[i])
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedObjectives {
    pub values: Vec<Vec<f64>>,
    pub bounds: NormalizationBounds,
    /// Columns whose ideal equals their nadir; those are all zeros.
    pub degenerate: Vec<bool>,
}

impl NormalizedObjectives {
    pub fn any_degenerate(&self) -> bool {
        self.degenerate.iter().any(|&d| d)
    }
}

pub fn normalize_rows(rows: &[Vec<f64>]) -> Result<NormalizedObjectives> {
    let bounds = NormalizationBounds::from_rows(rows)?;
    let degenerate = (0..bounds.dim()).map(|i| bounds.is_degenerate(i)).collect();
    let values = rows.iter().map(|r| bounds.normalize(r)).collect();
    Ok(NormalizedObjectives {
        values,
        bounds,
        degenerate,
    })
}

/// Min-max normalizes the archive's objective columns into `[0, 1]`.
pub fn normalize_objectives(archive: &Archive) -> Result<NormalizedObjectives> {
    if archive.is_empty() {
        return Err(Error::Empty("archive"));
    }
    normalize_rows(&archive.objectives())
}

pub fn clamp_to_bounds(x: &[f64], spec: &ProblemSpec) -> Vec<f64> {
    x.iter()
        .zip(spec.lower.iter().zip(&spec.upper))
        .map(|(&v, (&lo, &hi))| v.clamp(lo, hi))
        .collect()
}

/// Budget bookkeeping of one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunState {
    pub fe: usize,
    pub fe_max: usize,
    pub rng_seed: u64,
}

impl RunState {
    pub fn new(fe_max: usize, rng_seed: u64) -> Self {
        RunState {
            fe: 0,
            fe_max,
            rng_seed,
        }
    }

    pub fn remaining(&self) -> usize {
        self.fe_max - self.fe
    }

    pub fn exhausted(&self) -> bool {
        self.fe >= self.fe_max
    }

    pub fn progress(&self) -> f64 {
        if self.fe_max == 0 {
            return 1.0;
        }
        self.fe as f64 / self.fe_max as f64
    }
}
