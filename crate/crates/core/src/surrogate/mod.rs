//! Gaussian-process regression with an isotropic RBF kernel.
//!
//! Inputs are min-max scaled to the unit cube and targets standardized
//! before fitting. Hyperparameters (lengthscale and signal variance) maximize
//! the log marginal likelihood via multi-start Nelder–Mead in log space;
//! the noise jitter is fixed and only escalated when the covariance fails
//! to factorize.

mod linalg;
pub mod optim;

use log::warn;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::rng::{self, Component};
use linalg::{cholesky_in_place, dot, solve_lower, solve_lower_rows, solve_lower_transpose};
use optim::{nelder_mead, NelderMeadOptions};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

pub fn kernel_rbf(x1: &[f64], x2: &[f64], lengthscale: f64, signal_variance: f64) -> f64 {
    let d2: f64 = x1.iter().zip(x2).map(|(a, b)| (a - b) * (a - b)).sum();
    signal_variance * (-d2 / (2.0 * lengthscale * lengthscale)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub lengthscale: f64,
    pub signal_variance: f64,
    pub noise: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GpConfig {
    pub starts: usize,
    /// Starts used when a warm start is supplied, the warm start included.
    pub warm_starts: usize,
    pub noise: f64,
    pub max_noise: f64,
    pub lengthscale_range: (f64, f64),
    pub signal_variance_range: (f64, f64),
    pub evals_per_start: usize,
}

impl Default for GpConfig {
    fn default() -> Self {
        GpConfig {
            starts: 8,
            warm_starts: 1,
            noise: 1e-6,
            max_noise: 1e-2,
            lengthscale_range: (1e-2, 1e2),
            signal_variance_range: (1e-4, 1e2),
            evals_per_start: 60,
        }
    }
}

/// Squared Euclidean distances between rows, packed lower triangle
/// including the diagonal.
struct Distances {
    m: usize,
    packed: Vec<f64>,
}

impl Distances {
    fn new(x: &[Vec<f64>]) -> Self {
        let m = x.len();
        let mut packed = Vec::with_capacity(m * (m + 1) / 2);
        for i in 0..m {
            for j in 0..=i {
                packed.push(x[i].iter().zip(&x[j]).map(|(a, b)| (a - b) * (a - b)).sum());
            }
        }
        Distances { m, packed }
    }

    /// Dense row-major `K + noise I`.
    fn covariance(&self, h: &Hyperparams) -> Vec<f64> {
        let m = self.m;
        let mut k = vec![0.0; m * m];
        let inv = -1.0 / (2.0 * h.lengthscale * h.lengthscale);
        let mut idx = 0;
        for i in 0..m {
            for j in 0..=i {
                let v = h.signal_variance * (self.packed[idx] * inv).exp();
                k[i * m + j] = v;
                k[j * m + i] = v;
                idx += 1;
            }
            k[i * m + i] += h.noise;
        }
        k
    }
}

struct Factorized {
    chol: Vec<f64>,
    alpha: Vec<f64>,
    lml: f64,
}

fn factorize(dist: &Distances, y: &[f64], h: &Hyperparams) -> Option<Factorized> {
    let m = dist.m;
    let mut chol = dist.covariance(h);
    if !cholesky_in_place(&mut chol, m) {
        return None;
    }
    let z = solve_lower(&chol, m, y);
    let alpha = solve_lower_transpose(&chol, m, &z);
    let fit: f64 = y.iter().zip(&alpha).map(|(a, b)| a * b).sum();
    let log_det: f64 = (0..m).map(|i| chol[i * m + i].ln()).sum();
    let lml = -0.5 * fit - log_det - 0.5 * m as f64 * LN_2PI;
    Some(Factorized { chol, alpha, lml })
}

/// Log marginal likelihood `-1/2 y'a - sum log L_ii - (m/2) log 2 pi` of
/// targets `y` at inputs `x` (used as given, no scaling).
pub fn log_marginal_likelihood(x: &[Vec<f64>], y: &[f64], h: &Hyperparams) -> Result<f64> {
    check_len(x.len(), y.len())?;
    factorize(&Distances::new(x), y, h)
        .map(|f| f.lml)
        .ok_or(Error::NotPositiveDefinite(h.noise))
}

/// Analytic gradient of the log marginal likelihood with respect to
/// `(log lengthscale, log signal_variance)`.
pub fn log_marginal_likelihood_gradient(x: &[Vec<f64>], y: &[f64], h: &Hyperparams) -> Result<[f64; 2]> {
    check_len(x.len(), y.len())?;
    let m = x.len();
    let dist = Distances::new(x);
    let f = factorize(&dist, y, h).ok_or(Error::NotPositiveDefinite(h.noise))?;
    // inverse of K + noise I, column by column
    let mut inv = vec![0.0; m * m];
    let mut e = vec![0.0; m];
    for c in 0..m {
        e.iter_mut().for_each(|v| *v = 0.0);
        e[c] = 1.0;
        let col = solve_lower_transpose(&f.chol, m, &solve_lower(&f.chol, m, &e));
        for r in 0..m {
            inv[r * m + c] = col[r];
        }
    }
    let mut g = [0.0; 2];
    let l2 = h.lengthscale * h.lengthscale;
    for i in 0..m {
        for j in 0..m {
            let d2 = if i >= j {
                dist.packed[i * (i + 1) / 2 + j]
            } else {
                dist.packed[j * (j + 1) / 2 + i]
            };
            let kf = h.signal_variance * (-d2 / (2.0 * l2)).exp();
            let w = f.alpha[i] * f.alpha[j] - inv[i * m + j];
            g[0] += w * kf * d2 / l2;
            g[1] += w * kf;
        }
    }
    Ok([0.5 * g[0], 0.5 * g[1]])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpSummary {
    pub lengthscale: f64,
    pub signal_variance: f64,
    pub noise: f64,
    pub log_marginal_likelihood: f64,
    pub n_train: usize,
    pub n_duplicates: usize,
}

/// A fitted Gaussian process. Immutable after [`gp_fit`].
#[derive(Debug, Clone)]
pub struct GpModel {
    x: Vec<Vec<f64>>,
    x_offset: Vec<f64>,
    x_scale: Vec<f64>,
    y_mean: f64,
    y_std: f64,
    hyper: Hyperparams,
    chol: Vec<f64>,
    alpha: Vec<f64>,
    lml: f64,
    n_duplicates: usize,
}

impl GpModel {
    pub fn hyperparams(&self) -> Hyperparams {
        self.hyper
    }

    pub fn log_marginal_likelihood(&self) -> f64 {
        self.lml
    }

    pub fn n_train(&self) -> usize {
        self.x.len()
    }

    pub fn dim(&self) -> usize {
        self.x_offset.len()
    }

    pub fn summary(&self) -> GpSummary {
        GpSummary {
            lengthscale: self.hyper.lengthscale,
            signal_variance: self.hyper.signal_variance,
            noise: self.hyper.noise,
            log_marginal_likelihood: self.lml,
            n_train: self.x.len(),
            n_duplicates: self.n_duplicates,
        }
    }

    /// Target mean and standard deviation used to standardize the targets.
    pub fn standardization(&self) -> (f64, f64) {
        (self.y_mean, self.y_std)
    }

    fn scale(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.x_offset.iter().zip(&self.x_scale))
            .map(|(v, (o, s))| (v - o) / s)
            .collect()
    }

    /// Posterior mean and variance at `x`, in the original target units.
    pub fn predict(&self, x: &[f64]) -> (f64, f64) {
        let (mu, var) = self.predict_standardized(x);
        (self.y_mean + self.y_std * mu, var * self.y_std * self.y_std)
    }

    /// [`GpModel::predict_standardized`] for many points at once, sharing
    /// each factor row across the batch. Results are identical to the
    /// one-at-a-time form.
    pub fn predict_batch_standardized(&self, xs: &[Vec<f64>]) -> Vec<(f64, f64)> {
        let m = self.x.len();
        let p = xs.len();
        let mut kstar = vec![0.0; p * m];
        for (c, x) in xs.iter().enumerate() {
            let scaled = self.scale(x);
            for (slot, xi) in kstar[c * m..(c + 1) * m].iter_mut().zip(&self.x) {
                *slot = kernel_rbf(&scaled, xi, self.hyper.lengthscale, self.hyper.signal_variance);
            }
        }
        let mut v = kstar.clone();
        solve_lower_rows(&self.chol, m, &mut v);
        (0..p)
            .map(|c| {
                let mu = dot(&kstar[c * m..(c + 1) * m], &self.alpha);
                let vc = &v[c * m..(c + 1) * m];
                (mu, (self.hyper.signal_variance - dot(vc, vc)).max(0.0))
            })
            .collect()
    }

    /// Posterior mean and variance in standardized target units.
    pub fn predict_standardized(&self, x: &[f64]) -> (f64, f64) {
        let xs = self.scale(x);
        let kstar: Vec<f64> = self
            .x
            .iter()
            .map(|xi| kernel_rbf(&xs, xi, self.hyper.lengthscale, self.hyper.signal_variance))
            .collect();
        let mu = dot(&kstar, &self.alpha);
        let v = solve_lower(&self.chol, self.x.len(), &kstar);
        let reduction = dot(&v, &v);
        (mu, (self.hyper.signal_variance - reduction).max(0.0))
    }
}

pub fn gp_predict(model: &GpModel, x: &[f64]) -> (f64, f64) {
    model.predict(x)
}

/// Min-max scaling per column; constant columns keep unit scale.
fn unit_cube(x: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<f64>, Vec<f64>) {
    let n = x[0].len();
    let mut lo = x[0].clone();
    let mut hi = x[0].clone();
    for row in &x[1..] {
        for j in 0..n {
            lo[j] = lo[j].min(row[j]);
            hi[j] = hi[j].max(row[j]);
        }
    }
    let scale: Vec<f64> = lo
        .iter()
        .zip(&hi)
        .map(|(l, h)| if h > l { h - l } else { 1.0 })
        .collect();
    let scaled = x
        .iter()
        .map(|r| r.iter().zip(lo.iter().zip(&scale)).map(|(v, (o, s))| (v - o) / s).collect())
        .collect();
    (scaled, lo, scale)
}

/// Keeps the first of each group of identical scaled rows with the group's
/// mean target.
fn merge_duplicates(x: Vec<Vec<f64>>, y: &[f64]) -> (Vec<Vec<f64>>, Vec<f64>, usize) {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(x.len());
    let mut sums: Vec<f64> = Vec::with_capacity(x.len());
    let mut counts: Vec<usize> = Vec::with_capacity(x.len());
    for (row, &t) in x.into_iter().zip(y) {
        match rows.iter().position(|r| *r == row) {
            Some(i) => {
                sums[i] += t;
                counts[i] += 1;
            }
            None => {
                rows.push(row);
                sums.push(t);
                counts.push(1);
            }
        }
    }
    let dups = y.len() - rows.len();
    let targets = sums.iter().zip(&counts).map(|(s, c)| s / *c as f64).collect();
    (rows, targets, dups)
}

fn standardize(y: &[f64]) -> (Vec<f64>, f64, f64) {
    let m = y.len() as f64;
    let mean = y.iter().sum::<f64>() / m;
    let var = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / m;
    let std = if var.sqrt() > 1e-12 * mean.abs().max(1.0) { var.sqrt() } else { 1.0 };
    (y.iter().map(|v| (v - mean) / std).collect(), mean, std)
}

/// Fits a GP to `(x, y)`. `warm_start`, when given, replaces the first
/// random start and the start count drops to `config.warm_starts`.
/// Deterministic in `seed`.
pub fn gp_fit(x: &[Vec<f64>], y: &[f64], config: &GpConfig, seed: u64, warm_start: Option<Hyperparams>) -> Result<GpModel> {
    if x.is_empty() {
        return Err(Error::Empty("training inputs"));
    }
    check_len(x.len(), y.len())?;
    let n = x[0].len();
    for row in x {
        check_len(n, row.len())?;
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("non-finite training target".into()));
    }
    let (scaled, x_offset, x_scale) = unit_cube(x);
    let (xs, targets, n_duplicates) = merge_duplicates(scaled, y);
    if n_duplicates > 0 {
        warn!("merged {n_duplicates} duplicate training inputs");
    }
    let (ys, y_mean, y_std) = standardize(&targets);
    let dist = Distances::new(&xs);

    let (l_lo, l_hi) = (config.lengthscale_range.0.ln(), config.lengthscale_range.1.ln());
    let (s_lo, s_hi) = (config.signal_variance_range.0.ln(), config.signal_variance_range.1.ln());
    let clamp = |p: &[f64]| (p[0].clamp(l_lo, l_hi), p[1].clamp(s_lo, s_hi));

    let mut rng = rng::stream(seed, Component::Surrogate, 0);
    let count = if warm_start.is_some() { config.warm_starts } else { config.starts };
    let mut starts: Vec<[f64; 2]> = (0..count.max(1))
        .map(|_| [rng.random_range(l_lo..l_hi), rng.random_range(s_lo..s_hi)])
        .collect();
    if let Some(w) = warm_start {
        starts[0] = [w.lengthscale.ln(), w.signal_variance.ln()];
    }
    let opts = NelderMeadOptions {
        max_evals: config.evals_per_start,
        f_tol: 1e-6,
        x_tol: 1e-4,
    };

    let mut noise = config.noise;
    loop {
        let objective = |p: &[f64]| {
            let (ll, ls) = clamp(p);
            let h = Hyperparams {
                lengthscale: ll.exp(),
                signal_variance: ls.exp(),
                noise,
            };
            factorize(&dist, &ys, &h).map_or(f64::INFINITY, |f| -f.lml)
        };
        let mut best: Option<(f64, f64, f64)> = None;
        for s in &starts {
            let (p, v, _) = nelder_mead(objective, s, 0.5, opts);
            let (ll, ls) = clamp(&p);
            if v.is_finite() && best.is_none_or(|(_, _, bv)| v < bv) {
                best = Some((ll, ls, v));
            }
        }
        if let Some((ll, ls, _)) = best {
            let hyper = Hyperparams {
                lengthscale: ll.exp(),
                signal_variance: ls.exp(),
                noise,
            };
            if let Some(f) = factorize(&dist, &ys, &hyper) {
                return Ok(GpModel {
                    x: xs,
                    x_offset,
                    x_scale,
                    y_mean,
                    y_std,
                    hyper,
                    chol: f.chol,
                    alpha: f.alpha,
                    lml: f.lml,
                    n_duplicates,
                });
            }
        }
        if noise >= config.max_noise {
            return Err(Error::NotPositiveDefinite(noise));
        }
        noise = (noise * 10.0).min(config.max_noise);
        warn!("covariance not positive definite; raising noise jitter to {noise:e}");
    }
}

/// Builds a model at fixed hyperparameters, skipping the search.
pub fn gp_with_hyperparams(x: &[Vec<f64>], y: &[f64], hyper: Hyperparams) -> Result<GpModel> {
    if x.is_empty() {
        return Err(Error::Empty("training inputs"));
    }
    check_len(x.len(), y.len())?;
    let (scaled, x_offset, x_scale) = unit_cube(x);
    let (xs, targets, n_duplicates) = merge_duplicates(scaled, y);
    let (ys, y_mean, y_std) = standardize(&targets);
    let f = factorize(&Distances::new(&xs), &ys, &hyper).ok_or(Error::NotPositiveDefinite(hyper.noise))?;
    Ok(GpModel {
        x: xs,
        x_offset,
        x_scale,
        y_mean,
        y_std,
        hyper,
        chol: f.chol,
        alpha: f.alpha,
        lml: f.lml,
        n_duplicates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_values() {
        assert_eq!(kernel_rbf(&[0.3, 0.1], &[0.3, 0.1], 0.7, 2.5), 2.5);
        let l: f64 = 0.4;
        let x2 = [l * 2f64.sqrt(), 0.0];
        assert!((kernel_rbf(&[0.0, 0.0], &x2, l, 1.0) - (-1.0f64).exp()).abs() < 1e-15);
        let a = [0.1, 0.9, 0.3];
        let b = [0.7, 0.2, 0.5];
        assert_eq!(kernel_rbf(&a, &b, 0.3, 1.2), kernel_rbf(&b, &a, 0.3, 1.2));
    }

    #[test]
    fn fitted_factor_reconstructs_covariance() {
        let x: Vec<Vec<f64>> = (0..40).map(|i| vec![(i as f64 * 0.618).fract(), (i as f64 * 0.414).fract()]).collect();
        let y: Vec<f64> = x.iter().map(|r| r[0] * r[1] + (5.0 * r[0]).cos()).collect();
        let model = gp_fit(&x, &y, &GpConfig::default(), 2, None).unwrap();
        let m = model.n_train();
        let k = Distances::new(&model.x).covariance(&model.hyper);
        for i in 0..m {
            for j in 0..m {
                let v = dot(&model.chol[i * m..i * m + m], &model.chol[j * m..j * m + m]);
                assert!((v - k[i * m + j]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn constant_targets() {
        let x: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64 / 5.0]).collect();
        let y = vec![4.2; 6];
        let m = gp_fit(&x, &y, &GpConfig::default(), 1, None).unwrap();
        for t in [0.0, 0.33, 0.9, 3.0] {
            let (mu, var) = m.predict(&[t]);
            assert!((mu - 4.2).abs() < 1e-9);
            assert!(var <= 1e-4 + 1e-12, "{var}");
        }
    }

    #[test]
    fn single_point_interpolates() {
        let m = gp_fit(&[vec![0.0]], &[3.0], &GpConfig::default(), 0, None).unwrap();
        let (mu, var) = m.predict(&[0.0]);
        assert!((mu - 3.0).abs() <= m.hyperparams().noise.sqrt());
        assert!(var >= 0.0);
    }

    #[test]
    fn duplicates_are_averaged() {
        let x = vec![vec![0.0], vec![1.0], vec![0.0]];
        let y = vec![1.0, 5.0, 3.0];
        let m = gp_fit(&x, &y, &GpConfig::default(), 0, None).unwrap();
        assert_eq!(m.n_train(), 2);
        assert_eq!(m.summary().n_duplicates, 1);
        let (mu, _) = m.predict(&[0.0]);
        assert!((mu - 2.0).abs() < 1e-3, "{mu}");
    }

    #[test]
    fn input_errors() {
        let c = GpConfig::default();
        assert!(gp_fit(&[], &[], &c, 0, None).is_err());
        assert!(gp_fit(&[vec![0.0]], &[1.0, 2.0], &c, 0, None).is_err());
        assert!(gp_fit(&[vec![0.0], vec![0.0, 1.0]], &[1.0, 2.0], &c, 0, None).is_err());
        assert!(gp_fit(&[vec![0.0], vec![1.0]], &[1.0, f64::NAN], &c, 0, None).is_err());
    }

    #[test]
    fn fit_is_deterministic() {
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![(i as f64 * 0.37).fract(), (i as f64 * 0.61).fract()]).collect();
        let y: Vec<f64> = x.iter().map(|r| (3.0 * r[0]).sin() + r[1]).collect();
        let a = gp_fit(&x, &y, &GpConfig::default(), 9, None).unwrap();
        let b = gp_fit(&x, &y, &GpConfig::default(), 9, None).unwrap();
        assert_eq!(a.summary(), b.summary());
        assert_eq!(a.predict(&[0.3, 0.3]), b.predict(&[0.3, 0.3]));
    }
}
