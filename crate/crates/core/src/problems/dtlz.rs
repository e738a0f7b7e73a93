//! DTLZ1–7. Decision variables lie in `[0, 1]`; the last `n - k + 1` form
//! the distance vector `x_M`.

use std::f64::consts::{FRAC_PI_2, PI};

const DTLZ4_ALPHA: f64 = 100.0;

fn g_rastrigin(xm: &[f64]) -> f64 {
    let s: f64 = xm
        .iter()
        .map(|&v| (v - 0.5).powi(2) - (20.0 * PI * (v - 0.5)).cos())
        .sum();
    100.0 * (xm.len() as f64 + s)
}

fn g_sphere(xm: &[f64]) -> f64 {
    xm.iter().map(|&v| (v - 0.5).powi(2)).sum()
}

/// Linear simplex shape scaled by `0.5 (1 + g)`.
fn linear(pos: &[f64], k: usize, g: f64) -> Vec<f64> {
    (0..k)
        .map(|m| {
            let mut v = 0.5 * (1.0 + g);
            v *= pos[..k - 1 - m].iter().product::<f64>();
            if m > 0 {
                v *= 1.0 - pos[k - 1 - m];
            }
            v
        })
        .collect()
}

/// Spherical shape on angles `theta` (radians), radius `1 + g`.
pub(crate) fn spherical(theta: &[f64], k: usize, g: f64) -> Vec<f64> {
    (0..k)
        .map(|m| {
            let mut v = 1.0 + g;
            v *= theta[..k - 1 - m].iter().map(|t| t.cos()).product::<f64>();
            if m > 0 {
                v *= theta[k - 1 - m].sin();
            }
            v
        })
        .collect()
}

/// Angles of DTLZ5 and DTLZ6: the first is free, the rest collapse onto
/// `pi/4` as `g` goes to 0.
pub(crate) fn degenerate_angles(pos: &[f64], g: f64) -> Vec<f64> {
    pos.iter()
        .enumerate()
        .map(|(i, &v)| {
            if i == 0 {
                v * FRAC_PI_2
            } else {
                PI / (4.0 * (1.0 + g)) * (1.0 + 2.0 * g * v)
            }
        })
        .collect()
}

/// DTLZ7's last objective term `t (1 + sin(3 pi t))` for one position value.
pub(crate) fn dtlz7_term(t: f64) -> f64 {
    t * (1.0 + (3.0 * PI * t).sin())
}

pub(crate) fn evaluate(index: usize, k: usize, x: &[f64]) -> Vec<f64> {
    let (pos, xm) = x.split_at(k - 1);
    match index {
        1 => linear(pos, k, g_rastrigin(xm)),
        2 => {
            let theta: Vec<f64> = pos.iter().map(|v| v * FRAC_PI_2).collect();
            spherical(&theta, k, g_sphere(xm))
        }
        3 => {
            let theta: Vec<f64> = pos.iter().map(|v| v * FRAC_PI_2).collect();
            spherical(&theta, k, g_rastrigin(xm))
        }
        4 => {
            let theta: Vec<f64> = pos.iter().map(|v| v.powf(DTLZ4_ALPHA) * FRAC_PI_2).collect();
            spherical(&theta, k, g_sphere(xm))
        }
        5 => {
            let g = g_sphere(xm);
            spherical(&degenerate_angles(pos, g), k, g)
        }
        6 => {
            let g: f64 = xm.iter().map(|v| v.powf(0.1)).sum();
            spherical(&degenerate_angles(pos, g), k, g)
        }
        7 => {
            let g = 1.0 + 9.0 * xm.iter().sum::<f64>() / xm.len() as f64;
            let h = k as f64 - pos.iter().map(|&t| dtlz7_term(t) / (1.0 + g)).sum::<f64>();
            let mut f = pos.to_vec();
            f.push((1.0 + g) * h);
            f
        }
        _ => unreachable!("DTLZ index validated by the caller"),
    }
}
