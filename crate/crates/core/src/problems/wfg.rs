//! WFG1–9. Variable `i` (1-based) lies in `[0, 2i]`; the first `d` are
//! position parameters and the remaining `l` distance parameters.

use std::f64::consts::{FRAC_PI_2, PI};

const EPS: f64 = 1e-10;

fn clip01(v: f64) -> f64 {
    if v < 0.0 && v > -EPS {
        0.0
    } else if v > 1.0 && v < 1.0 + EPS {
        1.0
    } else {
        v.clamp(0.0, 1.0)
    }
}

// bias transformations

fn b_poly(y: f64, alpha: f64) -> f64 {
    clip01(y.powf(alpha))
}

fn b_flat(y: f64, a: f64, b: f64, c: f64) -> f64 {
    let t1 = (y - b).floor().min(0.0) * a * (b - y) / b;
    let t2 = (c - y).floor().min(0.0) * (1.0 - a) * (y - c) / (1.0 - c);
    clip01(a + t1 - t2)
}

fn b_param(y: f64, u: f64, a: f64, b: f64, c: f64) -> f64 {
    let v = a - (1.0 - 2.0 * u) * ((0.5 - u).floor() + a).abs();
    clip01(y.powf(b + (c - b) * v))
}

// shift transformations

fn s_linear(y: f64, a: f64) -> f64 {
    clip01((y - a).abs() / ((a - y).floor() + a).abs())
}

fn s_decept(y: f64, a: f64, b: f64, c: f64) -> f64 {
    let t1 = (y - a + b).floor() * (1.0 - c + (a - b) / b) / (a - b);
    let t2 = (a + b - y).floor() * (1.0 - c + (1.0 - a - b) / b) / (1.0 - a - b);
    clip01(1.0 + ((y - a).abs() - b) * (t1 + t2 + 1.0 / b))
}

fn s_multi(y: f64, a: f64, b: f64, c: f64) -> f64 {
    let t1 = (y - c).abs() / (2.0 * ((c - y).floor() + c));
    let t2 = (4.0 * a + 2.0) * PI * (0.5 - t1);
    clip01((1.0 + t2.cos() + 4.0 * b * t1 * t1) / (b + 2.0))
}

// reduction transformations

fn r_sum(y: &[f64], w: &[f64]) -> f64 {
    let num: f64 = y.iter().zip(w).map(|(a, b)| a * b).sum();
    clip01(num / w.iter().sum::<f64>())
}

fn r_sum_flat(y: &[f64]) -> f64 {
    clip01(y.iter().sum::<f64>() / y.len() as f64)
}

fn r_nonsep(y: &[f64], a: usize) -> f64 {
    let n = y.len();
    let mut num = 0.0;
    for j in 0..n {
        num += y[j];
        for k in 0..a.saturating_sub(1) {
            num += (y[j] - y[(j + k + 1) % n]).abs();
        }
    }
    let half = a.div_ceil(2) as f64;
    let den = (n as f64 / a as f64) * half * (1.0 + 2.0 * a as f64 - 2.0 * half);
    clip01(num / den)
}

// shapes on x_1..x_{M-1}, m is 1-based

fn convex(x: &[f64], m: usize) -> f64 {
    let mm = x.len() + 1;
    let mut r: f64 = x[..mm - m].iter().map(|v| 1.0 - (v * FRAC_PI_2).cos()).product();
    if m > 1 {
        r *= 1.0 - (x[mm - m] * FRAC_PI_2).sin();
    }
    clip01(r)
}

fn concave(x: &[f64], m: usize) -> f64 {
    let mm = x.len() + 1;
    let mut r: f64 = x[..mm - m].iter().map(|v| (v * FRAC_PI_2).sin()).product();
    if m > 1 {
        r *= (x[mm - m] * FRAC_PI_2).cos();
    }
    clip01(r)
}

fn linear(x: &[f64], m: usize) -> f64 {
    let mm = x.len() + 1;
    let mut r: f64 = x[..mm - m].iter().product();
    if m > 1 {
        r *= 1.0 - x[mm - m];
    }
    clip01(r)
}

pub(crate) fn mixed(x1: f64) -> f64 {
    let a = 5.0;
    clip01(1.0 - x1 - (2.0 * a * PI * x1 + FRAC_PI_2).cos() / (2.0 * a * PI))
}

pub(crate) fn disc(x1: f64) -> f64 {
    let a = 5.0;
    clip01(1.0 - x1 * (a * x1 * PI).cos().powi(2))
}

/// Shape family of the front.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Shape {
    ConvexMixed,
    ConvexDisc,
    Linear,
    Concave,
}

pub(crate) fn shape_of(index: usize) -> Shape {
    match index {
        1 => Shape::ConvexMixed,
        2 => Shape::ConvexDisc,
        3 => Shape::Linear,
        _ => Shape::Concave,
    }
}

/// Objective values `x_M + 2m h_m(x)` of the shape parameters `x` and
/// distance value `dist`.
pub(crate) fn shape_objectives(shape: Shape, x: &[f64], dist: f64) -> Vec<f64> {
    let k = x.len() + 1;
    (1..=k)
        .map(|m| {
            let h = match shape {
                Shape::ConvexMixed | Shape::ConvexDisc if m == k => {
                    if shape == Shape::ConvexMixed {
                        mixed(x[0])
                    } else {
                        disc(x[0])
                    }
                }
                Shape::ConvexMixed | Shape::ConvexDisc => convex(x, m),
                Shape::Linear => linear(x, m),
                Shape::Concave => concave(x, m),
            };
            dist + 2.0 * m as f64 * h
        })
        .collect()
}

/// Groups position parameters into `k - 1` reductions and distance
/// parameters into one, applying `reduce` to each.
fn reduce_groups(y: &[f64], d: usize, k: usize, reduce: impl Fn(&[f64], usize) -> f64) -> Vec<f64> {
    let per = d / (k - 1);
    let mut t: Vec<f64> = (0..k - 1).map(|i| reduce(&y[i * per..(i + 1) * per], i * per)).collect();
    t.push(reduce(&y[d..], d));
    t
}

/// Weighted reduction with weights `2 (offset + j + 1)`.
fn r_sum_indexed(y: &[f64], offset: usize) -> f64 {
    let w: Vec<f64> = (0..y.len()).map(|j| 2.0 * (offset + j + 1) as f64).collect();
    r_sum(y, &w)
}

pub(crate) fn evaluate(index: usize, k: usize, d: usize, x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut y: Vec<f64> = x.iter().enumerate().map(|(i, v)| clip01(v / (2.0 * (i + 1) as f64))).collect();
    let pp = |y: &mut Vec<f64>, f: &dyn Fn(usize, f64) -> f64| {
        for (i, v) in y.iter_mut().enumerate() {
            *v = f(i, *v);
        }
    };
    let t: Vec<f64> = match index {
        1 => {
            pp(&mut y, &|i, v| if i < d { v } else { s_linear(v, 0.35) });
            pp(&mut y, &|i, v| if i < d { v } else { b_flat(v, 0.8, 0.75, 0.85) });
            pp(&mut y, &|_, v| b_poly(v, 0.02));
            reduce_groups(&y, d, k, r_sum_indexed)
        }
        2 | 3 => {
            pp(&mut y, &|i, v| if i < d { v } else { s_linear(v, 0.35) });
            let l = n - d;
            let mut z = y[..d].to_vec();
            for i in 0..l / 2 {
                z.push(r_nonsep(&y[d + 2 * i..d + 2 * i + 2], 2));
            }
            reduce_groups(&z, d, k, |g, _| r_sum_flat(g))
        }
        4 => {
            pp(&mut y, &|_, v| s_multi(v, 30.0, 10.0, 0.35));
            reduce_groups(&y, d, k, |g, _| r_sum_flat(g))
        }
        5 => {
            pp(&mut y, &|_, v| s_decept(v, 0.35, 0.001, 0.05));
            reduce_groups(&y, d, k, |g, _| r_sum_flat(g))
        }
        6 => {
            pp(&mut y, &|i, v| if i < d { v } else { s_linear(v, 0.35) });
            reduce_groups(&y, d, k, |g, _| r_nonsep(g, g.len()))
        }
        7 => {
            let src = y.clone();
            pp(&mut y, &|i, v| {
                if i < d {
                    b_param(v, r_sum_flat(&src[i + 1..]), 0.98 / 49.98, 0.02, 50.0)
                } else {
                    v
                }
            });
            pp(&mut y, &|i, v| if i < d { v } else { s_linear(v, 0.35) });
            reduce_groups(&y, d, k, |g, _| r_sum_flat(g))
        }
        8 => {
            let src = y.clone();
            pp(&mut y, &|i, v| {
                if i < d {
                    v
                } else {
                    b_param(v, r_sum_flat(&src[..i]), 0.98 / 49.98, 0.02, 50.0)
                }
            });
            pp(&mut y, &|i, v| if i < d { v } else { s_linear(v, 0.35) });
            reduce_groups(&y, d, k, |g, _| r_sum_flat(g))
        }
        9 => {
            let src = y.clone();
            pp(&mut y, &|i, v| {
                if i + 1 < n {
                    b_param(v, r_sum_flat(&src[i + 1..]), 0.98 / 49.98, 0.02, 50.0)
                } else {
                    v
                }
            });
            pp(&mut y, &|i, v| {
                if i < d {
                    s_decept(v, 0.35, 0.001, 0.05)
                } else {
                    s_multi(v, 30.0, 95.0, 0.35)
                }
            });
            reduce_groups(&y, d, k, |g, _| r_nonsep(g, g.len()))
        }
        _ => unreachable!("WFG index validated by the caller"),
    };
    let dist = t[k - 1];
    let degenerate = index == 3;
    let pos: Vec<f64> = (0..k - 1)
        .map(|i| {
            let a = if degenerate && i > 0 { 0.0 } else { 1.0 };
            dist.max(a) * (t[i] - 0.5) + 0.5
        })
        .collect();
    shape_objectives(shape_of(index), &pos, dist)
}
