//! Expected improvement and the real-coded genetic algorithm that
//! maximizes it over the decision box.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::ProblemSpec;
use crate::error::{Error, Result};
use crate::rng::{self, Component};
use crate::surrogate::GpModel;

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

pub fn normal_pdf(z: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * z * z).exp()
}

pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Expected improvement below `y_best` of a Gaussian with mean `mu` and
/// standard deviation `sigma` (minimization).
///
/// For `mu < y_best` this is evaluated as `d + sigma (phi(z) - z Phi(-z))`,
/// which keeps the result at least `d` and monotone in `sigma` to the last
/// bit.
pub fn expected_improvement(mu: f64, sigma: f64, y_best: f64) -> f64 {
    if !(sigma > 1e-12) {
        return 0.0;
    }
    let diff = y_best - mu;
    let z = diff / sigma;
    if z >= 0.0 {
        diff + sigma * (normal_pdf(z) - z * normal_cdf(-z)).max(0.0)
    } else {
        (sigma * (normal_pdf(z) + z * normal_cdf(z))).max(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaConfig {
    pub population: usize,
    pub generations: usize,
    pub crossover_prob: f64,
    /// Per-variable mutation probability; `None` means `1/n`.
    pub mutation_prob: Option<f64>,
    pub sbx_eta: f64,
    pub mutation_eta: f64,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population: 100,
            generations: 100,
            crossover_prob: 0.9,
            mutation_prob: None,
            sbx_eta: 15.0,
            mutation_eta: 20.0,
            seed: 0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population < 4 || self.population % 2 != 0 {
            return Err(Error::Config(format!(
                "GA population must be even and >= 4, got {}",
                self.population
            )));
        }
        if !(0.0..=1.0).contains(&self.crossover_prob) {
            return Err(Error::Config("crossover probability outside [0, 1]".into()));
        }
        if let Some(p) = self.mutation_prob {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config("mutation probability outside [0, 1]".into()));
            }
        }
        Ok(())
    }
}

/// Simulated binary crossover on one variable pair, bounded form.
fn sbx_pair(rng: &mut ChaCha8Rng, a: f64, b: f64, lo: f64, hi: f64, eta: f64) -> (f64, f64) {
    if (a - b).abs() <= 1e-14 {
        return (a, b);
    }
    let (y1, y2) = if a < b { (a, b) } else { (b, a) };
    let u: f64 = rng.random();
    let child = |beta: f64| {
        let alpha = 2.0 - beta.powf(-(eta + 1.0));
        if u <= 1.0 / alpha {
            (u * alpha).powf(1.0 / (eta + 1.0))
        } else {
            (1.0 / (2.0 - u * alpha)).powf(1.0 / (eta + 1.0))
        }
    };
    let beta_lo = 1.0 + 2.0 * (y1 - lo) / (y2 - y1);
    let c1 = 0.5 * ((y1 + y2) - child(beta_lo) * (y2 - y1));
    let beta_hi = 1.0 + 2.0 * (hi - y2) / (y2 - y1);
    let c2 = 0.5 * ((y1 + y2) + child(beta_hi) * (y2 - y1));
    let (c1, c2) = (c1.clamp(lo, hi), c2.clamp(lo, hi));
    if rng.random::<bool>() {
        (c2, c1)
    } else {
        (c1, c2)
    }
}

/// Bounded polynomial mutation of one variable.
fn polynomial_mutation(rng: &mut ChaCha8Rng, y: f64, lo: f64, hi: f64, eta: f64) -> f64 {
    let span = hi - lo;
    let d1 = (y - lo) / span;
    let d2 = (hi - y) / span;
    let u: f64 = rng.random();
    let power = 1.0 / (eta + 1.0);
    let dq = if u < 0.5 {
        let v = 2.0 * u + (1.0 - 2.0 * u) * (1.0 - d1).powf(eta + 1.0);
        v.powf(power) - 1.0
    } else {
        let v = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - d2).powf(eta + 1.0);
        1.0 - v.powf(power)
    };
    (y + dq * span).clamp(lo, hi)
}

fn tournament<'a>(rng: &mut ChaCha8Rng, pop: &'a [(Vec<f64>, f64)]) -> &'a [f64] {
    let a = &pop[rng.random_range(0..pop.len())];
    let b = &pop[rng.random_range(0..pop.len())];
    if b.1 > a.1 {
        &b.0
    } else {
        &a.0
    }
}

/// Maximizes a black-box function over the box `[lower, upper]`.
///
/// Binary tournament selection, SBX crossover, polynomial mutation and an
/// elite of one. Every candidate is clamped into the box before it is
/// evaluated. Returns the best individual ever evaluated.
pub fn ga_maximize<F>(mut objective: F, lower: &[f64], upper: &[f64], config: &GaConfig) -> Result<(Vec<f64>, f64)>
where
    F: FnMut(&[f64]) -> f64,
{
    ga_maximize_batch(|xs| xs.iter().map(|x| objective(x)).collect(), lower, upper, config)
}

/// [`ga_maximize`] with the objective applied to a whole generation at a
/// time. The objective must return one value per input, in order.
pub fn ga_maximize_batch<F>(mut objective: F, lower: &[f64], upper: &[f64], config: &GaConfig) -> Result<(Vec<f64>, f64)>
where
    F: FnMut(&[Vec<f64>]) -> Vec<f64>,
{
    config.validate()?;
    let n = lower.len();
    if n == 0 || upper.len() != n || lower.iter().zip(upper).any(|(l, h)| !(l < h)) {
        return Err(Error::InvalidParameter("GA needs a non-empty box with lower < upper".into()));
    }
    let mut rng = rng::stream(config.seed, Component::Genetic, 0);
    let pm = config.mutation_prob.unwrap_or(1.0 / n as f64);
    let mut score = |xs: Vec<Vec<f64>>| -> Vec<(Vec<f64>, f64)> {
        let values = objective(&xs);
        assert_eq!(values.len(), xs.len(), "objective returned the wrong number of values");
        xs.into_iter()
            .zip(values)
            .map(|(x, v)| (x, if v.is_nan() { f64::NEG_INFINITY } else { v }))
            .collect()
    };

    let initial: Vec<Vec<f64>> = (0..config.population)
        .map(|_| lower.iter().zip(upper).map(|(&l, &h)| rng.random_range(l..=h)).collect())
        .collect();
    let mut pop = score(initial);
    let mut best = pop
        .iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .cloned()
        .expect("population is non-empty");

    for _ in 0..config.generations {
        let mut children: Vec<Vec<f64>> = Vec::with_capacity(config.population);
        while children.len() < config.population {
            let mut c1 = tournament(&mut rng, &pop).to_vec();
            let mut c2 = tournament(&mut rng, &pop).to_vec();
            if rng.random::<f64>() < config.crossover_prob {
                for j in 0..n {
                    if rng.random::<bool>() {
                        let (a, b) = sbx_pair(&mut rng, c1[j], c2[j], lower[j], upper[j], config.sbx_eta);
                        c1[j] = a;
                        c2[j] = b;
                    }
                }
            }
            for child in [&mut c1, &mut c2] {
                for j in 0..n {
                    if rng.random::<f64>() < pm {
                        child[j] = polynomial_mutation(&mut rng, child[j], lower[j], upper[j], config.mutation_eta);
                    }
                    child[j] = child[j].clamp(lower[j], upper[j]);
                }
            }
            children.push(c1);
            children.push(c2);
        }
        children.truncate(config.population);
        let mut offspring = score(children);
        // elitism: the best-so-far replaces the worst child
        let worst = offspring
            .iter()
            .enumerate()
            .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
            .map(|(i, _)| i)
            .expect("offspring is non-empty");
        offspring[worst] = best.clone();
        for cand in &offspring {
            if cand.1 > best.1 {
                best = cand.clone();
            }
        }
        pop = offspring;
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Infill {
    pub x: Vec<f64>,
    /// Expected improvement at `x` in target units.
    pub ei: f64,
    pub perturbed: bool,
}

/// Relative per-coordinate perturbation applied to a duplicate proposal.
pub const DUPLICATE_PERTURBATION: f64 = 1e-6;

fn is_duplicate(x: &[f64], existing: &[Vec<f64>]) -> bool {
    existing.iter().any(|e| e.as_slice() == x)
}

/// Next decision vector to evaluate: the GA's best expected improvement
/// under `model` relative to the best target in `targets`. A proposal that
/// coincides with an archived input is nudged by a uniform perturbation of
/// `1e-6` times each variable's range.
pub fn propose_infill(
    model: &GpModel,
    targets: &[f64],
    problem: &ProblemSpec,
    archive_x: &[Vec<f64>],
    config: &GaConfig,
) -> Result<Infill> {
    let y_best = targets
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if !y_best.is_finite() {
        return Err(Error::Empty("training targets"));
    }
    let (mean, std) = model.standardization();
    let best_std = (y_best - mean) / std;
    let ei_std = |x: &[f64]| {
        let (mu, var) = model.predict_standardized(x);
        expected_improvement(mu, var.sqrt(), best_std)
    };
    let ei_batch = |xs: &[Vec<f64>]| {
        model
            .predict_batch_standardized(xs)
            .into_iter()
            .map(|(mu, var)| expected_improvement(mu, var.sqrt(), best_std))
            .collect()
    };
    let (mut x, ei) = ga_maximize_batch(ei_batch, &problem.lower, &problem.upper, config)?;
    let mut perturbed = false;
    let mut rng = rng::stream(config.seed, Component::Perturb, 0);
    while is_duplicate(&x, archive_x) {
        perturbed = true;
        for j in 0..x.len() {
            let range = problem.upper[j] - problem.lower[j];
            let delta = rng.random_range(-1.0..=1.0) * DUPLICATE_PERTURBATION * range;
            x[j] = (x[j] + delta).clamp(problem.lower[j], problem.upper[j]);
        }
    }
    let ei = if perturbed { ei_std(&x) } else { ei };
    Ok(Infill { x, ei: ei * std, perturbed })
}
