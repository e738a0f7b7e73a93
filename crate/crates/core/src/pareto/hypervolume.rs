//! Hypervolume of a point set with respect to a reference point.
//!
//! Exact values come from a two-dimensional sweep and, above two objectives,
//! the WFG exclusive-hypervolume recursion. Large many-objective sets fall
//! back to a quasi-Monte-Carlo estimate over a Kronecker sequence.

use serde::{Deserialize, Serialize};

use super::dominates;
use crate::sampling::kronecker_alphas;

/// Largest objective count always computed exactly.
pub const EXACT_MAX_OBJECTIVES: usize = 6;
/// Above [`EXACT_MAX_OBJECTIVES`], sets this small are still computed exactly.
pub const EXACT_MAX_POINTS: usize = 16;
pub const QMC_SAMPLES: usize = 1 << 21;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypervolumeEstimate {
    pub value: f64,
    pub std_error: f64,
    pub exact: bool,
}

/// Clips every point to the reference box and drops points with zero volume
/// and dominated or duplicated points.
fn prepare(points: &[Vec<f64>], reference: &[f64]) -> Vec<Vec<f64>> {
    let clipped: Vec<Vec<f64>> = points
        .iter()
        .map(|p| p.iter().zip(reference).map(|(&v, &r)| v.min(r)).collect::<Vec<f64>>())
        .filter(|p: &Vec<f64>| p.iter().zip(reference).all(|(v, r)| v < r))
        .collect();
    nondominated_unique(clipped)
}

fn nondominated_unique(mut pts: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite objective values"));
    pts.dedup();
    let mut keep = Vec::with_capacity(pts.len());
    for i in 0..pts.len() {
        if !pts.iter().any(|q| dominates(q, &pts[i])) {
            keep.push(i);
        }
    }
    keep.into_iter().map(|i| pts[i].clone()).collect()
}

fn box_volume(p: &[f64], reference: &[f64]) -> f64 {
    p.iter().zip(reference).map(|(v, r)| r - v).product()
}

/// Sweep over mutually nondominated 2-D points.
fn sweep_2d(points: &[Vec<f64>], reference: &[f64]) -> f64 {
    let mut pts: Vec<(f64, f64)> = points.iter().map(|p| (p[0], p[1])).collect();
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite objective values"));
    let mut volume = 0.0;
    let mut ceiling = reference[1];
    for (x, y) in pts {
        if y < ceiling {
            volume += (reference[0] - x) * (ceiling - y);
            ceiling = y;
        }
    }
    volume
}

fn wfg(points: &[Vec<f64>], reference: &[f64]) -> f64 {
    match points.len() {
        0 => 0.0,
        1 => box_volume(&points[0], reference),
        _ if reference.len() == 2 => sweep_2d(points, reference),
        _ => {
            let mut pts = points.to_vec();
            pts.sort_by(|a, b| a[0].partial_cmp(&b[0]).expect("finite objective values"));
            (0..pts.len())
                .map(|i| {
                    let p = &pts[i];
                    let limited: Vec<Vec<f64>> = pts[i + 1..]
                        .iter()
                        .map(|q| q.iter().zip(p).map(|(a, b)| a.max(*b)).collect())
                        .collect();
                    box_volume(p, reference) - wfg(&nondominated_unique(limited), reference)
                })
                .sum()
        }
    }
}

/// Exact hypervolume, any objective count. Cost grows exponentially with
/// the number of objectives.
pub fn hypervolume_exact(points: &[Vec<f64>], reference: &[f64]) -> f64 {
    let pts = prepare(points, reference);
    wfg(&pts, reference)
}

/// Quasi-Monte-Carlo estimate over the bounding box `[min(points), reference]`.
pub fn hypervolume_qmc(points: &[Vec<f64>], reference: &[f64], samples: usize) -> HypervolumeEstimate {
    let pts = prepare(points, reference);
    if pts.is_empty() {
        return HypervolumeEstimate {
            value: 0.0,
            std_error: 0.0,
            exact: true,
        };
    }
    let d = reference.len();
    let mut lower = pts[0].clone();
    for p in &pts[1..] {
        for i in 0..d {
            lower[i] = lower[i].min(p[i]);
        }
    }
    let width: Vec<f64> = reference.iter().zip(&lower).map(|(r, l)| r - l).collect();
    let box_vol: f64 = width.iter().product();
    let alphas = kronecker_alphas(d);
    let mut u: Vec<f64> = vec![0.5; d];
    let mut sample = vec![0.0; d];
    let mut hits = 0usize;
    for _ in 0..samples {
        for i in 0..d {
            u[i] = (u[i] + alphas[i]).fract();
            sample[i] = lower[i] + u[i] * width[i];
        }
        if pts
            .iter()
            .any(|p| p.iter().zip(&sample).all(|(a, b)| a <= b))
        {
            hits += 1;
        }
    }
    let frac = hits as f64 / samples as f64;
    HypervolumeEstimate {
        value: frac * box_vol,
        std_error: box_vol * (frac * (1.0 - frac) / samples as f64).sqrt(),
        exact: false,
    }
}

/// Exact when the objective count is at most [`EXACT_MAX_OBJECTIVES`] or the
/// nondominated set has at most [`EXACT_MAX_POINTS`] points, QMC otherwise.
pub fn hypervolume_estimate(points: &[Vec<f64>], reference: &[f64]) -> HypervolumeEstimate {
    let pts = prepare(points, reference);
    if reference.len() <= EXACT_MAX_OBJECTIVES || pts.len() <= EXACT_MAX_POINTS {
        HypervolumeEstimate {
            value: wfg(&pts, reference),
            std_error: 0.0,
            exact: true,
        }
    } else {
        hypervolume_qmc(&pts, reference, QMC_SAMPLES)
    }
}

/// Lebesgue measure of the union of boxes `[p, reference]`. Empty input gives 0.
pub fn hypervolume(points: &[Vec<f64>], reference: &[f64]) -> f64 {
    hypervolume_estimate(points, reference).value
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_boxes() {
        let pts = vec![vec![0.25, 0.75], vec![0.75, 0.25]];
        assert!((hypervolume(&pts, &[1.0, 1.0]) - 0.3125).abs() < 1e-15);
    }

    #[test]
    fn single_point_and_empty() {
        assert!((hypervolume(&[vec![0.2, 0.5, 0.9]], &[1.0, 1.0, 1.0]) - 0.8 * 0.5 * 0.1).abs() < 1e-15);
        assert_eq!(hypervolume(&[], &[1.0, 1.0]), 0.0);
        // entirely outside the reference box
        assert_eq!(hypervolume(&[vec![1.5, 0.2]], &[1.0, 1.0]), 0.0);
    }

    #[test]
    fn points_beyond_reference_are_clipped() {
        // (0.5, 1.5) clips to (0.5, 1.0), which has zero volume
        let v = hypervolume(&[vec![0.5, 1.5], vec![0.5, 0.5]], &[1.0, 1.0]);
        assert!((v - 0.25).abs() < 1e-15);
    }

    #[test]
    fn three_d_inclusion_exclusion() {
        let a = vec![0.2, 0.6, 0.4];
        let b = vec![0.5, 0.3, 0.7];
        let r = [1.0, 1.0, 1.0];
        let inter: Vec<f64> = a.iter().zip(&b).map(|(x, y): (&f64, &f64)| x.max(*y)).collect();
        let expect = box_volume(&a, &r) + box_volume(&b, &r) - box_volume(&inter, &r);
        assert!((hypervolume_exact(&[a, b], &r) - expect).abs() < 1e-15);
    }

    #[test]
    fn qmc_agrees_with_exact_in_seven_objectives() {
        let mut state = 12345u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        // points near the unit sphere are mostly mutually nondominated
        let pts: Vec<Vec<f64>> = (0..30)
            .map(|_| {
                let v: Vec<f64> = (0..7).map(|_| next() + 0.05).collect();
                let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                v.into_iter().map(|x| x / n).collect()
            })
            .collect();
        let r = vec![1.0; 7];
        let exact = hypervolume_exact(&pts, &r);
        let est = hypervolume_qmc(&pts, &r, 1 << 18);
        assert!((exact - est.value).abs() < 5e-3 * exact.max(1e-3), "{exact} vs {}", est.value);
        assert!(!hypervolume_estimate(&pts, &r).exact);
    }

    fn set(k: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
        prop::collection::vec(prop::collection::vec(0.0f64..1.0, k), 1..12)
    }

    proptest! {
        #[test]
        fn monotone_under_insertion(pts in set(3), extra in prop::collection::vec(0.0f64..1.0, 3)) {
            let r = [1.0, 1.0, 1.0];
            let base = hypervolume_exact(&pts, &r);
            let mut more = pts.clone();
            more.push(extra);
            prop_assert!(hypervolume_exact(&more, &r) >= base - 1e-12);
            // a point dominated by an existing one changes nothing
            let worse: Vec<f64> = pts[0].iter().map(|v| (v + 1.0) / 2.0).collect();
            let mut dominated = pts.clone();
            dominated.push(worse);
            prop_assert!((hypervolume_exact(&dominated, &r) - base).abs() <= 1e-12);
        }

        #[test]
        fn scale_law(pts in set(4), c in 0.1f64..10.0) {
            let r = vec![1.0; 4];
            let base = hypervolume_exact(&pts, &r);
            let scaled: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().map(|v| v * c).collect()).collect();
            let rs: Vec<f64> = r.iter().map(|v| v * c).collect();
            let got = hypervolume_exact(&scaled, &rs);
            prop_assert!((got - base * c.powi(4)).abs() <= 1e-9 * (base * c.powi(4)).max(1e-300));
        }

        #[test]
        fn sweep_matches_recursion(pts in set(2)) {
            let r = [1.0, 1.0];
            let nd = prepare(&pts, &r);
            // inclusion-exclusion over consecutive sorted staircase points
            let mut sorted = nd.clone();
            sorted.sort_by(|a, b| a[0].partial_cmp(&b[0]).unwrap());
            let mut ie = 0.0;
            for (i, p) in sorted.iter().enumerate() {
                ie += box_volume(p, &r);
                if i > 0 {
                    let q = &sorted[i - 1];
                    ie -= box_volume(&[p[0].max(q[0]), p[1].max(q[1])], &r);
                }
            }
            prop_assert!((sweep_2d(&nd, &r) - ie).abs() <= 1e-12);
        }
    }
}
