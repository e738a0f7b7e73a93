use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scalbo::domain::NormalizationBounds;
use scalbo::pareto::dominates;
use scalbo::scalarizers::*;
use scalbo::RunState;

const TOL: f64 = 1e-9;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOL
}

fn ctx2(w: &[f64]) -> ScalarizerContext {
    let k = w.len();
    ScalarizerContext {
        w: w.to_vec(),
        bounds: NormalizationBounds {
            ideal: vec![0.0; k],
            nadir: vec![1.0; k],
        },
        gamma: 0.1,
        run: RunState::new(100, 0),
        lattice_h: 4,
    }
}

fn random_simplex(rng: &mut ChaCha8Rng, k: usize, positive: bool) -> Vec<f64> {
    let raw: Vec<f64> = (0..k)
        .map(|_| {
            let u: f64 = rng.random();
            if positive {
                u + 0.01
            } else {
                u
            }
        })
        .collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / s).collect()
}

#[test]
fn pointwise_hand_values() {
    let e = std::f64::consts::E;
    assert!(close(weighted_sum(&[0.2, 0.4], &[0.5, 0.5]).unwrap(), 0.3));
    assert!(close(weighted_sum(&[0.7, 0.1], &[1.0, 0.0]).unwrap(), 0.7));
    let third = 1.0 / 3.0;
    assert!(close(weighted_sum(&[0.5; 3], &[third; 3]).unwrap(), 0.5));

    assert!(close(exp_weighted_criterion(&[0.0, 0.0], &[0.5, 0.5], 1.0).unwrap(), 2.0 * (-0.5f64).exp()));
    assert!(close(exp_weighted_criterion(&[0.0, 0.0], &[1.0, 0.0], 1.0).unwrap(), 1.0 + (-1.0f64).exp()));
    let big = exp_weighted_criterion(&[1.0, 1.0], &[0.5, 0.5], 100.0).unwrap();
    let expect = 2.0 * 149f64.exp();
    assert!(((big - expect) / expect).abs() < 1e-12);

    assert!(close(weighted_power(&[0.5, 0.5], &[0.5, 0.5], 3.0).unwrap(), 0.125));
    assert!(close(weighted_power(&[0.0, 1.0], &[0.5, 0.5], 3.0).unwrap(), 0.5));

    assert!(close(weighted_norm(&[0.25, 0.25], &[0.5, 0.5], 0.5).unwrap(), 0.25));
    assert!(close(weighted_norm(&[1.0, 0.0], &[0.5, 0.5], 2.0).unwrap(), 0.5f64.sqrt()));

    assert!(close(weighted_product(&[0.25, 0.25], &[0.5, 0.5]).unwrap(), 0.25));
    assert_eq!(weighted_product(&[0.0, 0.4], &[0.5, 0.5]).unwrap(), 0.0);
    assert!(close(weighted_product(&[e, e * e], &[0.5, 0.5]).unwrap(), 1.5f64.exp()));

    assert!(close(chebyshev(&[0.5, 0.5], &[0.4, 0.6]).unwrap(), 0.3));
    assert_eq!(chebyshev(&[0.0, 0.0], &[0.4, 0.6]).unwrap(), 0.0);
    assert!(close(chebyshev(&[1.0, 0.1], &[0.5, 0.5]).unwrap(), 0.5));

    assert!(close(augmented_chebyshev(&[0.5, 0.5], &[0.4, 0.6], 1e-4).unwrap(), 0.3001));
    assert_eq!(augmented_chebyshev(&[0.0, 0.0], &[0.4, 0.6], 1e-4).unwrap(), 0.0);

    assert!(close(modified_chebyshev(&[0.5, 0.5], &[0.4, 0.6], 1e-4).unwrap(), 0.30006));
    assert!(close(modified_chebyshev(&[0.2, 0.8], &[1.0, 0.0], 0.1).unwrap(), 0.3));

    assert!(close(pbi(&[0.5, 0.5], &[1.0, 1.0], 5.0).unwrap(), 0.5f64.sqrt()));
    assert!(close(pbi(&[0.0, 1.0], &[1.0, 0.0], 5.0).unwrap(), 5.0));
    let (d1, d2) = pbi_distances(&[0.6, 0.2], &[1.0, 1.0]).unwrap();
    assert!((d1 - 0.565_685_424_949_238).abs() < 1e-12);
    assert!((d2 - 0.282_842_712_474_619).abs() < 1e-12);
    assert!((pbi(&[0.6, 0.2], &[1.0, 1.0], 5.0).unwrap() - 1.979_898_987_322_333).abs() < 1e-12);

    let nadir = [1.0, 1.0];
    assert!(close(inverted_pbi(&[0.5, 0.5], &[1.0, 1.0], 5.0, &nadir).unwrap(), -(0.5f64.sqrt())));
    assert_eq!(inverted_pbi(&nadir, &[1.0, 1.0], 5.0, &nadir).unwrap(), 0.0);
    assert!(close(inverted_pbi(&[1.0, 0.0], &[1.0, 0.0], 5.0, &nadir).unwrap(), 5.0));

    let on_dir = [0.3, 0.3];
    let (d1, _) = pbi_distances(&on_dir, &[1.0, 1.0]).unwrap();
    assert!(close(quadratic_pbi(&on_dir, &[1.0, 1.0], 1.0, 0.25).unwrap(), d1));
    assert!(close(quadratic_pbi(&[0.0, 1.0], &[1.0, 0.0], 1.0, 0.5).unwrap(), 2.0));
    assert!(close(qpbi_d_star(1.0, 4, &[0.0, 0.0], &[1.0, 1.0]).unwrap(), 0.25));
}

#[test]
fn apd_hand_values() {
    let w = [0.6, 0.8];
    let f = [0.3, 0.4];
    assert!(close(apd(&f, &w, 2.0, 0.7, 0.2).unwrap(), 0.5));
    let off = [0.9, 0.1];
    let len = (0.82f64).sqrt();
    assert!(close(apd(&off, &w, 2.0, 0.0, 0.2).unwrap(), len));
    // theta equal to gamma, half the budget spent
    let w = [1.0, 0.0];
    let gamma: f64 = 0.3;
    let f = [gamma.cos(), gamma.sin()];
    assert!(close(apd(&f, &w, 2.0, 0.5, gamma).unwrap(), 1.5));
}

#[test]
fn setwise_hand_values() {
    let rows = vec![vec![0.2, 0.8], vec![0.8, 0.2], vec![0.9, 0.9]];
    let g = hypi_fitness(&rows, &[1.0, 1.0]).unwrap();
    for (got, want) in g.iter().zip([0.16, 0.16, 0.01]) {
        assert!(close(*got, want), "{g:?}");
    }
    assert!(close(hypi_fitness(&[vec![0.5, 0.5]], &[1.0, 1.0]).unwrap()[0], 0.25));

    let d = domrank_fitness(&[vec![0.1, 0.1], vec![0.2, 0.2], vec![0.05, 0.5]]).unwrap();
    assert_eq!(d, vec![1.0, 0.5, 1.0]);
    let chain = domrank_fitness(&[vec![1.0, 1.0], vec![2.0, 2.0], vec![3.0, 3.0]]).unwrap();
    assert_eq!(chain[2], 0.0);
    assert_eq!(chain[0], 1.0);

    let m = msd_fitness(&[vec![0.0, 1.0], vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap();
    assert!(close(m[2], 0.0));
    let m = msd_fitness(&[vec![0.0, 1.0], vec![1.0, 0.0], vec![0.6, 0.6]]).unwrap();
    assert!(close(m[2], -0.2));
}

#[test]
fn dispatch_hand_values() {
    let ctx = ctx2(&[0.5, 0.5]);
    let tch = ScalarizerSpec::new(ScalarizerKind::Chebyshev);
    let g = scalarize_rows(&tch, &[vec![0.0, 0.0], vec![1.0, 1.0]], &ctx).unwrap();
    assert_eq!(g, vec![0.0, 0.5]);

    let rows = vec![vec![0.1, 0.9], vec![0.4, 0.3], vec![1.0, 1.0]];
    let ws = scalarize_rows(&ScalarizerSpec::new(ScalarizerKind::WeightedSum), &rows, &ctx).unwrap();
    for (g, r) in ws.iter().zip(&rows) {
        assert_eq!(*g, weighted_sum(r, &ctx.w).unwrap());
    }
    let dr = scalarize_rows(&ScalarizerSpec::new(ScalarizerKind::DominanceRank), &rows, &ctx).unwrap();
    assert_eq!(dr[2], 0.0);
    assert_eq!(dr[0], -1.0);
}

#[test]
fn weak_dominance_monotonicity() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10_000 {
        let k = rng.random_range(2..=5);
        let w = random_simplex(&mut rng, k, true);
        let b: Vec<f64> = (0..k).map(|_| rng.random()).collect();
        let mut a = b.clone();
        let moved = rng.random_range(0..k);
        for (i, v) in a.iter_mut().enumerate() {
            if i == moved || rng.random_bool(0.5) {
                *v *= rng.random::<f64>() * 0.99;
            }
        }
        let le = |x: f64, y: f64| x <= y + 1e-15;
        assert!(le(weighted_sum(&a, &w).unwrap(), weighted_sum(&b, &w).unwrap()));
        assert!(weighted_sum(&a, &w).unwrap() < weighted_sum(&b, &w).unwrap());
        assert!(le(weighted_power(&a, &w, 3.0).unwrap(), weighted_power(&b, &w, 3.0).unwrap()));
        assert!(le(weighted_norm(&a, &w, 0.5).unwrap(), weighted_norm(&b, &w, 0.5).unwrap()));
        assert!(le(chebyshev(&a, &w).unwrap(), chebyshev(&b, &w).unwrap()));
        assert!(augmented_chebyshev(&a, &w, 1e-4).unwrap() < augmented_chebyshev(&b, &w, 1e-4).unwrap());
        assert!(modified_chebyshev(&a, &w, 1e-4).unwrap() < modified_chebyshev(&b, &w, 1e-4).unwrap());
    }
}

#[test]
fn special_cases_coincide() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..2_000 {
        let k = rng.random_range(2..=6);
        let w = random_simplex(&mut rng, k, false);
        let f: Vec<f64> = (0..k).map(|_| rng.random()).collect();
        let ws = weighted_sum(&f, &w).unwrap();
        assert!((weighted_norm(&f, &w, 1.0).unwrap() - ws).abs() < 1e-12);
        assert!((weighted_power(&f, &w, 1.0).unwrap() - ws).abs() < 1e-12);
        let tch = chebyshev(&f, &w).unwrap();
        assert!((augmented_chebyshev(&f, &w, 0.0).unwrap() - tch).abs() < 1e-12);
        assert!((modified_chebyshev(&f, &w, 0.0).unwrap() - tch).abs() < 1e-12);
    }
}

#[test]
fn chebyshev_is_the_norm_limit() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..2_000 {
        let k = rng.random_range(2..=10);
        let w = random_simplex(&mut rng, k, false);
        let f: Vec<f64> = (0..k).map(|_| rng.random()).collect();
        // weights inside the power: (sum (w_i f_i)^p)^(1/p)
        let wf: Vec<f64> = w.iter().zip(&f).map(|(a, b)| a * b).collect();
        let wn = weighted_norm(&wf, &vec![1.0; k], 64.0).unwrap();
        let tch = chebyshev(&f, &w).unwrap();
        assert!(wn >= tch - 1e-12);
        assert!(wn - tch <= tch * ((k as f64).powf(1.0 / 64.0) - 1.0) + 1e-12);
    }
}

#[test]
fn pbi_decomposition_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5_000 {
        let k = rng.random_range(2..=10);
        let w = random_simplex(&mut rng, k, true);
        let f: Vec<f64> = (0..k).map(|_| rng.random()).collect();
        let (d1, d2) = pbi_distances(&f, &w).unwrap();
        let n2: f64 = f.iter().map(|v| v * v).sum();
        assert!((d1 * d1 + d2 * d2 - n2).abs() < 1e-9);
    }
}

#[test]
fn permutation_equivariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for kind in ScalarizerKind::ALL {
        let spec = ScalarizerSpec::new(kind);
        for _ in 0..50 {
            let k = 3;
            let rows: Vec<Vec<f64>> = (0..8).map(|_| (0..k).map(|_| rng.random()).collect()).collect();
            let w = random_simplex(&mut rng, k, true);
            let perm = [2, 0, 1];
            let prow: Vec<Vec<f64>> = rows.iter().map(|r| perm.iter().map(|&p| r[p]).collect()).collect();
            let pw: Vec<f64> = perm.iter().map(|&p| w[p]).collect();
            let a = scalarize_rows(&spec, &rows, &ctx2(&w)).unwrap();
            let b = scalarize_rows(&spec, &prow, &ctx2(&pw)).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0), "{kind}: {x} vs {y}");
            }
        }
    }
}

#[test]
fn dispatch_is_pure() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let rows: Vec<Vec<f64>> = (0..20).map(|_| (0..3).map(|_| rng.random()).collect()).collect();
    let ctx = ctx2(&[0.2, 0.3, 0.5]);
    for kind in ScalarizerKind::ALL {
        let spec = ScalarizerSpec::new(kind);
        let a = scalarize_rows(&spec, &rows, &ctx).unwrap();
        let b = scalarize_rows(&spec, &rows, &ctx).unwrap();
        assert_eq!(a, b, "{kind}");
    }
}

fn random_set(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..k).map(|_| (rng.random::<f64>() * 10.0).round() / 10.0).collect())
        .collect()
}

#[test]
fn setwise_dominance_orders() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..300 {
        let k = rng.random_range(2..=4);
        let n = rng.random_range(2..=25);
        let rows = random_set(&mut rng, n, k);
        let dr = domrank_fitness(&rows).unwrap();
        let ms = msd_fitness(&rows).unwrap();
        let hy = hypi_fitness(&rows, &vec![1.1; k]).unwrap();
        for a in 0..n {
            for b in 0..n {
                if dominates(&rows[a], &rows[b]) {
                    assert!(dr[a] > dr[b]);
                    assert!(ms[a] > ms[b]);
                    assert!(hy[a] >= hy[b] - 1e-12);
                }
            }
        }
    }
}

#[test]
fn hypi_matches_monte_carlo() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let rows: Vec<Vec<f64>> = (0..12).map(|_| (0..3).map(|_| rng.random()).collect()).collect();
    let reference = [1.0; 3];
    let g = hypi_fitness(&rows, &reference).unwrap();

    // each sample records which points dominate it; H(S) counts samples
    // whose mask meets S
    let part = scalbo::pareto::nondominated_sort(&rows).unwrap();
    let samples = 10_000_000usize;
    let mut masks = std::collections::HashMap::<u16, u64>::new();
    let mut mc = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..samples {
        let u = [mc.random::<f64>(), mc.random::<f64>(), mc.random::<f64>()];
        let mut mask = 0u16;
        for (i, r) in rows.iter().enumerate() {
            if r[0] <= u[0] && r[1] <= u[1] && r[2] <= u[2] {
                mask |= 1 << i;
            }
        }
        if mask != 0 {
            *masks.entry(mask).or_default() += 1;
        }
    }
    for (f, front) in part.fronts.iter().enumerate() {
        let next: u16 = part.fronts.get(f + 1).map_or(0, |n| n.iter().map(|&i| 1u16 << i).sum());
        for &i in front {
            let set = next | (1 << i);
            let hits: u64 = masks.iter().filter(|(m, _)| *m & set != 0).map(|(_, c)| c).sum();
            let est = hits as f64 / samples as f64;
            assert!((est - g[i]).abs() < 2e-3, "point {i}: {est} vs {}", g[i]);
        }
    }
}
