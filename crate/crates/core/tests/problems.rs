use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scalbo::pareto::{igd, nondominated_indices};
use scalbo::problems::{
    all_instances, nadir_of_front, reference_front, reference_front_cached, BenchmarkInstance, Problem,
};
use serde::Deserialize;

#[derive(Deserialize)]
struct Vector {
    problem: String,
    k: usize,
    x: Vec<f64>,
    f: Vec<f64>,
}

/// Values frozen from an unrelated open-source implementation of both suites.
#[test]
fn matches_frozen_third_party_values() {
    let text = include_str!("data/benchmark_vectors.json");
    let vectors: Vec<Vector> = serde_json::from_str(text).unwrap();
    assert!(vectors.len() > 200);
    for v in &vectors {
        let inst = BenchmarkInstance::from_name(&v.problem, v.k).unwrap();
        let f = inst.evaluate(&v.x).unwrap();
        for (a, b) in f.iter().zip(&v.f) {
            assert!(
                (a - b).abs() <= 1e-9 * b.abs().max(1.0),
                "{} k={}: {f:?} vs {:?}",
                v.problem,
                v.k,
                v.f
            );
        }
    }
}

#[test]
fn dtlz_examples() {
    let d2 = BenchmarkInstance::dtlz(2, 2).unwrap();
    let f = d2.evaluate(&[0.0, 0.5, 0.5, 0.5, 0.5, 0.5]).unwrap();
    assert!((f[0] - 1.0).abs() < 1e-12 && f[1].abs() < 1e-12);
    let d1 = BenchmarkInstance::dtlz(1, 2).unwrap();
    let f = d1.evaluate(&[0.5; 6]).unwrap();
    assert!((f[0] - 0.25).abs() < 1e-9 && (f[1] - 0.25).abs() < 1e-9);
}

#[test]
fn out_of_bounds_and_wrong_length_rejected() {
    let d2 = BenchmarkInstance::dtlz(2, 2).unwrap();
    assert!(d2.evaluate(&[1.5, 0.5, 0.5, 0.5, 0.5, 0.5]).is_err());
    assert!(d2.evaluate(&[0.5; 5]).is_err());
    let w = BenchmarkInstance::wfg(4, 2).unwrap();
    let mut x = vec![1.0; 8];
    x[0] = 2.5;
    assert!(w.evaluate(&x).is_err());
}

// Straightforward second implementation of WFG4 from the transformation
// definitions, written without sharing any code with the library.
fn wfg4_reference(x: &[f64], k_obj: usize, k_pos: usize) -> Vec<f64> {
    use std::f64::consts::PI;
    let n = x.len();
    let z: Vec<f64> = (0..n).map(|i| x[i] / (2.0 * (i as f64 + 1.0))).collect();
    let t1: Vec<f64> = z
        .iter()
        .map(|&y| {
            let (a, b, c) = (30.0, 10.0, 0.35);
            let tmp1 = (y - c).abs() / (2.0 * ((c - y).floor() + c));
            let tmp2 = (4.0 * a + 2.0) * PI * (0.5 - tmp1);
            (1.0 + tmp2.cos() + 4.0 * b * tmp1.powi(2)) / (b + 2.0)
        })
        .collect();
    let group = k_pos / (k_obj - 1);
    let mut t2 = Vec::new();
    for i in 0..k_obj - 1 {
        let s = &t1[i * group..(i + 1) * group];
        t2.push(s.iter().sum::<f64>() / s.len() as f64);
    }
    let s = &t1[k_pos..];
    t2.push(s.iter().sum::<f64>() / s.len() as f64);
    let xm = t2[k_obj - 1];
    let pos: Vec<f64> = t2[..k_obj - 1].iter().map(|&t| xm.max(1.0) * (t - 0.5) + 0.5).collect();
    let mut f = Vec::new();
    for m in 1..=k_obj {
        let mut h = 1.0;
        for p in pos.iter().take(k_obj - m) {
            h *= (p * PI / 2.0).sin();
        }
        if m > 1 {
            h *= (pos[k_obj - m] * PI / 2.0).cos();
        }
        f.push(xm + 2.0 * m as f64 * h);
    }
    f
}

#[test]
fn wfg4_matches_independent_evaluator() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for k in [2, 3, 5] {
        let inst = BenchmarkInstance::wfg(4, k).unwrap();
        let upper = inst.upper();
        for _ in 0..200 {
            let x: Vec<f64> = upper.iter().map(|&u| rng.random_range(0.0..=u)).collect();
            let a = inst.evaluate(&x).unwrap();
            let b = wfg4_reference(&x, k, inst.d);
            for (p, q) in a.iter().zip(&b) {
                assert!((p - q).abs() < 1e-12, "{a:?} vs {b:?}");
            }
        }
    }
}

#[test]
fn outputs_finite_and_wfg_within_envelope() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in [2, 3, 5, 10] {
        for inst in all_instances(k).unwrap() {
            let upper = inst.upper();
            for _ in 0..2_000 {
                let x: Vec<f64> = upper.iter().map(|&u| rng.random_range(0.0..=u)).collect();
                let f = inst.evaluate(&x).unwrap();
                assert!(f.iter().all(|v| v.is_finite()));
                if inst.suite == scalbo::problems::Suite::Wfg {
                    for (m, v) in f.iter().enumerate() {
                        assert!(*v >= 0.0 && *v <= 1.0 + 2.0 * (m + 1) as f64 + 1e-9, "{inst} {f:?}");
                    }
                }
            }
        }
    }
}

#[test]
fn dtlz3_optima_lie_on_the_sphere() {
    let inst = BenchmarkInstance::dtlz(3, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let mut x = vec![0.5; inst.n];
        x[0] = rng.random();
        x[1] = rng.random();
        let f = inst.evaluate(&x).unwrap();
        assert!((f.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn front_samples_satisfy_their_shape() {
    let f = reference_front(&BenchmarkInstance::dtlz(2, 2).unwrap(), 500);
    assert_eq!(f.len(), 500);
    assert!(f.iter().all(|p| (p[0] * p[0] + p[1] * p[1] - 1.0).abs() < 1e-9));
    let f = reference_front(&BenchmarkInstance::dtlz(1, 3).unwrap(), 500);
    assert!(f.iter().all(|p| (p.iter().sum::<f64>() - 0.5).abs() < 1e-9));
    for idx in 4..=9 {
        let f = reference_front(&BenchmarkInstance::wfg(idx, 3).unwrap(), 300);
        for p in &f {
            let r: f64 = p.iter().enumerate().map(|(i, v)| (v / (2.0 * (i + 1) as f64)).powi(2)).sum();
            assert!((r - 1.0).abs() < 1e-9);
        }
    }
    assert_eq!(igd(&f, &f).unwrap(), 0.0);
}

#[test]
fn front_samples_are_attainable_and_nondominated() {
    // every front point of a 2-objective problem is mutually nondominated
    for inst in all_instances(2).unwrap() {
        let f = reference_front(&inst, 400);
        let nd = nondominated_indices(&f);
        assert!(nd.len() as f64 >= 0.95 * f.len() as f64, "{inst}: {} of {}", nd.len(), f.len());
    }
    // DTLZ7 front points are reached by the evaluator at g = 1
    let inst = BenchmarkInstance::dtlz(7, 3).unwrap();
    for p in reference_front(&inst, 50) {
        let mut x = vec![0.0; inst.n];
        x[..2].copy_from_slice(&p[..2]);
        let f = inst.evaluate(&x).unwrap();
        assert!((f[2] - p[2]).abs() < 1e-12);
    }
}

#[test]
fn nadir_examples() {
    let n = nadir_of_front(&BenchmarkInstance::dtlz(2, 2).unwrap());
    assert!((n[0] - 1.0).abs() < 1e-9 && (n[1] - 1.0).abs() < 1e-9);
    let n = nadir_of_front(&BenchmarkInstance::dtlz(1, 2).unwrap());
    assert!((n[0] - 0.5).abs() < 1e-9 && (n[1] - 0.5).abs() < 1e-9);
    let n = nadir_of_front(&BenchmarkInstance::wfg(4, 2).unwrap());
    assert!((n[0] - 2.0).abs() < 1e-9 && (n[1] - 4.0).abs() < 1e-9);
    let r = BenchmarkInstance::wfg(4, 2).unwrap().hv_reference();
    assert!((r[0] - 4.0).abs() < 1e-9 && (r[1] - 8.0).abs() < 1e-9);
    assert_eq!(BenchmarkInstance::dtlz(3, 3).unwrap().hv_reference(), vec![900.0; 3]);
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let inst = BenchmarkInstance::wfg(2, 2).unwrap();
    let a = reference_front_cached(&inst, 200, Some(dir.path())).unwrap();
    let b = reference_front_cached(&inst, 200, Some(dir.path())).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, reference_front(&inst, 200));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}
