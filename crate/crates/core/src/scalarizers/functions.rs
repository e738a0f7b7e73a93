//! Pointwise scalarizing functions. Each maps one objective vector and a
//! weight vector to a single value. Inputs are expected to be normalized so
//! that the ideal point is the origin.

use crate::error::{check_len, Error, Result};
use crate::sampling::angle_between;

fn check(f: &[f64], w: &[f64]) -> Result<()> {
    check_len(w.len(), f.len())
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn weighted_sum(f: &[f64], w: &[f64]) -> Result<f64> {
    check(f, w)?;
    Ok(f.iter().zip(w).map(|(fi, wi)| wi * fi).sum())
}

/// `sum exp(p w_i - 1) exp(p f_i)`; errors if an exponent argument exceeds 700.
pub fn exp_weighted_criterion(f: &[f64], w: &[f64], p: f64) -> Result<f64> {
    check(f, w)?;
    if !(p > 0.0) {
        return Err(Error::InvalidParameter(format!("EWC needs p > 0, got {p}")));
    }
    let mut total = 0.0;
    for (fi, wi) in f.iter().zip(w) {
        let a = p * wi - 1.0;
        let b = p * fi;
        for arg in [a, b] {
            if arg > 700.0 {
                return Err(Error::Overflow(arg));
            }
        }
        total += a.exp() * b.exp();
    }
    Ok(total)
}

pub fn weighted_power(f: &[f64], w: &[f64], p: f64) -> Result<f64> {
    check(f, w)?;
    Ok(f.iter().zip(w).map(|(fi, wi)| wi * fi.powf(p)).sum())
}

/// Weighted `L_p` metric `(sum w_i |f_i|^p)^(1/p)`.
pub fn weighted_norm(f: &[f64], w: &[f64], p: f64) -> Result<f64> {
    check(f, w)?;
    if p == 0.0 || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("WN needs finite p != 0, got {p}")));
    }
    let inner: f64 = f.iter().zip(w).map(|(fi, wi)| wi * fi.abs().powf(p)).sum();
    Ok(inner.powf(1.0 / p))
}

/// Product of powers `prod f_i^w_i` with `0^0 = 1`.
pub fn weighted_product(f: &[f64], w: &[f64]) -> Result<f64> {
    check(f, w)?;
    Ok(f.iter()
        .zip(w)
        .map(|(&fi, &wi)| if wi == 0.0 { 1.0 } else { fi.powf(wi) })
        .product())
}

pub fn chebyshev(f: &[f64], w: &[f64]) -> Result<f64> {
    check(f, w)?;
    Ok(f.iter()
        .zip(w)
        .map(|(fi, wi)| wi * fi.abs())
        .fold(f64::NEG_INFINITY, f64::max))
}

pub fn augmented_chebyshev(f: &[f64], w: &[f64], alpha: f64) -> Result<f64> {
    let tch = chebyshev(f, w)?;
    let l1: f64 = f.iter().map(|v| v.abs()).sum();
    Ok(tch + alpha * l1)
}

pub fn modified_chebyshev(f: &[f64], w: &[f64], alpha: f64) -> Result<f64> {
    check(f, w)?;
    let l1: f64 = f.iter().map(|v| v.abs()).sum();
    Ok(f.iter()
        .zip(w)
        .map(|(fi, wi)| wi * (fi.abs() + alpha * l1))
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Distance along the unit weight direction and distance from that line.
pub fn pbi_distances(f: &[f64], w: &[f64]) -> Result<(f64, f64)> {
    check(f, w)?;
    let wn = norm(w);
    if wn == 0.0 {
        return Err(Error::InvalidParameter("PBI weight vector is zero".into()));
    }
    let d1 = f.iter().zip(w).map(|(fi, wi)| fi * wi / wn).sum::<f64>().abs();
    let d2 = f
        .iter()
        .zip(w)
        .map(|(fi, wi)| {
            let r = fi - d1 * wi / wn;
            r * r
        })
        .sum::<f64>()
        .sqrt();
    Ok((d1, d2))
}

pub fn pbi(f: &[f64], w: &[f64], theta: f64) -> Result<f64> {
    let (d1, d2) = pbi_distances(f, w)?;
    Ok(d1 + theta * d2)
}

/// Inverted PBI on `nadir - f`; smaller is better.
pub fn inverted_pbi(f: &[f64], w: &[f64], theta: f64, nadir: &[f64]) -> Result<f64> {
    check_len(f.len(), nadir.len())?;
    let shifted: Vec<f64> = nadir.iter().zip(f).map(|(z, v)| z - v).collect();
    let (d1, d2) = pbi_distances(&shifted, w)?;
    Ok(theta * d2 - d1)
}

/// Adaptive normalizer `alpha (1/H) (1/k) sum(nadir - ideal)`.
pub fn qpbi_d_star(alpha: f64, lattice_h: usize, ideal: &[f64], nadir: &[f64]) -> Result<f64> {
    check_len(ideal.len(), nadir.len())?;
    if lattice_h == 0 {
        return Err(Error::InvalidParameter("lattice resolution H must be >= 1".into()));
    }
    let k = ideal.len() as f64;
    let spread: f64 = nadir.iter().zip(ideal).map(|(n, i)| n - i).sum();
    Ok(alpha * spread / (lattice_h as f64 * k))
}

pub fn quadratic_pbi(f: &[f64], w: &[f64], theta: f64, d_star: f64) -> Result<f64> {
    if !(d_star > 0.0) {
        return Err(Error::InvalidParameter(format!("QPBI needs d* > 0, got {d_star}")));
    }
    let (d1, d2) = pbi_distances(f, w)?;
    Ok(d1 + theta * d2 * d2 / d_star)
}

/// Angle-penalized distance `(1 + P(theta)) |f|` with
/// `P = k progress^alpha theta / gamma` and `progress = FE / FE_max`.
pub fn apd(f: &[f64], w: &[f64], alpha: f64, progress: f64, gamma: f64) -> Result<f64> {
    check(f, w)?;
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "APD needs a positive minimum angle gamma, got {gamma}"
        )));
    }
    let len = norm(f);
    if len == 0.0 {
        return Ok(0.0);
    }
    let theta = angle_between(f, w);
    let penalty = f.len() as f64 * progress.powf(alpha) * theta / gamma;
    Ok((1.0 + penalty) * len)
}
