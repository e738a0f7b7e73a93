use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scalbo::surrogate::*;

fn dataset(seed: u64, m: usize, n: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| rng.random()).collect()).collect();
    let y = x
        .iter()
        .map(|r| (4.0 * r[0]).sin() + r.iter().skip(1).map(|v| v * v).sum::<f64>() + 0.1 * rng.random::<f64>())
        .collect();
    (x, y)
}

/// Dense LU with partial pivoting: returns `(K^-1 y, log det K)`.
fn dense_solve_logdet(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> (Vec<f64>, f64) {
    let n = b.len();
    let mut log_det = 0.0;
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, p);
        b.swap(c, p);
        log_det += a[c][c].abs().ln();
        for r in (c + 1)..n {
            let f = a[r][c] / a[c][c];
            for t in c..n {
                a[r][t] -= f * a[c][t];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = ((r + 1)..n).map(|t| a[r][t] * x[t]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    (x, log_det)
}

#[test]
fn lml_matches_dense_formula() {
    let (x, y) = dataset(1, 7, 2);
    let h = Hyperparams {
        lengthscale: 0.4,
        signal_variance: 1.3,
        noise: 1e-3,
    };
    let k: Vec<Vec<f64>> = (0..x.len())
        .map(|i| {
            (0..x.len())
                .map(|j| kernel_rbf(&x[i], &x[j], h.lengthscale, h.signal_variance) + if i == j { h.noise } else { 0.0 })
                .collect()
        })
        .collect();
    let (alpha, log_det) = dense_solve_logdet(k, y.clone());
    let fit: f64 = y.iter().zip(&alpha).map(|(a, b)| a * b).sum();
    let want = -0.5 * fit - 0.5 * log_det - 0.5 * x.len() as f64 * (2.0 * std::f64::consts::PI).ln();
    let got = log_marginal_likelihood(&x, &y, &h).unwrap();
    assert!((got - want).abs() < 1e-9 * want.abs().max(1.0), "{got} vs {want}");
}

#[test]
fn lml_gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for trial in 0..20 {
        let (x, y) = dataset(100 + trial, rng.random_range(4..12), rng.random_range(1..4));
        let (ll, ls) = (rng.random_range(-1.5f64..0.5), rng.random_range(-1.0f64..1.0));
        let at = |a: f64, b: f64| {
            let h = Hyperparams {
                lengthscale: a.exp(),
                signal_variance: b.exp(),
                noise: 1e-4,
            };
            log_marginal_likelihood(&x, &y, &h).unwrap()
        };
        let h = Hyperparams {
            lengthscale: ll.exp(),
            signal_variance: ls.exp(),
            noise: 1e-4,
        };
        let g = log_marginal_likelihood_gradient(&x, &y, &h).unwrap();
        let step = 1e-5;
        let fd = [
            (at(ll + step, ls) - at(ll - step, ls)) / (2.0 * step),
            (at(ll, ls + step) - at(ll, ls - step)) / (2.0 * step),
        ];
        for i in 0..2 {
            let scale = g[i].abs().max(fd[i].abs()).max(1.0);
            assert!((g[i] - fd[i]).abs() <= 1e-4 * scale, "trial {trial}: {g:?} vs {fd:?}");
        }
    }
}

#[test]
fn interpolates_training_points() {
    let (x, y) = dataset(3, 15, 2);
    let config = GpConfig {
        noise: 1e-8,
        ..GpConfig::default()
    };
    let model = gp_fit(&x, &y, &config, 0, None).unwrap();
    let range = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - y.iter().cloned().fold(f64::INFINITY, f64::min);
    for (xi, yi) in x.iter().zip(&y) {
        let (mu, _) = gp_predict(&model, xi);
        assert!((mu - yi).abs() <= 1e-4 * range, "{mu} vs {yi}");
        let (_, var_std) = model.predict_standardized(xi);
        assert!(var_std <= model.hyperparams().noise + 1e-8);
    }
}

#[test]
fn reverts_to_prior_far_from_data() {
    let (x, y) = dataset(4, 12, 2);
    let model = gp_fit(&x, &y, &GpConfig::default(), 0, None).unwrap();
    let (mean, std) = model.standardization();
    let h = model.hyperparams();
    let (mu, var) = model.predict(&[1e3, -1e3]);
    assert!((mu - mean).abs() < 1e-9 * std.max(1.0));
    assert!((var - h.signal_variance * std * std).abs() < 1e-9 * var);
}

#[test]
fn single_point_closed_form() {
    let h = Hyperparams {
        lengthscale: 0.7,
        signal_variance: 1.8,
        noise: 1e-2,
    };
    let model = gp_with_hyperparams(&[vec![0.3]], &[2.5], h).unwrap();
    for t in [0.3, 0.5, 1.2, -0.4] {
        let kx = kernel_rbf(&[t - 0.3], &[0.0], h.lengthscale, h.signal_variance);
        let (mu, var) = model.predict_standardized(&[t]);
        // k(x, x1) / (sf2 + sn2) times the standardized target, which is zero
        // for a lone point
        assert_eq!(mu, 0.0);
        let want = h.signal_variance - kx * kx / (h.signal_variance + h.noise);
        assert!((var - want).abs() < 1e-12, "{var} vs {want}");
        assert!((model.predict(&[t]).0 - 2.5).abs() < 1e-12);
    }
}

#[test]
fn adding_points_never_increases_variance() {
    let (x, y) = dataset(5, 20, 2);
    let h = Hyperparams {
        lengthscale: 0.3,
        signal_variance: 1.0,
        noise: 1e-6,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let tests: Vec<Vec<f64>> = (0..50).map(|_| vec![rng.random(), rng.random()]).collect();
    // pin the unit-cube scaling with the box corners so it does not change
    let mut xs = vec![vec![0.0, 0.0], vec![1.0, 1.0]];
    let mut ys = vec![0.0, 1.0];
    let mut prev: Option<Vec<f64>> = None;
    for (xi, yi) in x.iter().zip(&y) {
        xs.push(xi.clone());
        ys.push(*yi);
        let model = gp_with_hyperparams(&xs, &ys, h).unwrap();
        let vars: Vec<f64> = tests.iter().map(|t| model.predict_standardized(t).1).collect();
        if let Some(p) = &prev {
            for (a, b) in vars.iter().zip(p) {
                assert!(*a <= b + 1e-7);
            }
        }
        prev = Some(vars);
    }
}

#[test]
fn batch_prediction_equals_single() {
    let (x, y) = dataset(7, 30, 3);
    let model = gp_fit(&x, &y, &GpConfig::default(), 1, None).unwrap();
    let (q, _) = dataset(8, 17, 3);
    let batch = model.predict_batch_standardized(&q);
    for (p, b) in q.iter().zip(&batch) {
        assert_eq!(model.predict_standardized(p), *b);
    }
}

#[test]
fn invariant_to_input_affine_maps() {
    let (x, y) = dataset(9, 14, 2);
    let moved: Vec<Vec<f64>> = x.iter().map(|r| vec![3.0 * r[0] - 7.0, 0.5 * r[1] + 2.0]).collect();
    let a = gp_fit(&x, &y, &GpConfig::default(), 4, None).unwrap();
    let b = gp_fit(&moved, &y, &GpConfig::default(), 4, None).unwrap();
    for t in [[0.2, 0.9], [0.5, 0.5], [0.77, 0.1]] {
        let (ma, va) = a.predict(&t);
        let (mb, vb) = b.predict(&[3.0 * t[0] - 7.0, 0.5 * t[1] + 2.0]);
        assert!((ma - mb).abs() < 1e-8, "{ma} vs {mb}");
        assert!((va - vb).abs() < 1e-8);
    }
}

#[test]
fn posterior_variance_is_nonnegative() {
    let (x, y) = dataset(10, 25, 2);
    let model = gp_fit(&x, &y, &GpConfig::default(), 0, None).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let t = [rng.random_range(-0.5..1.5), rng.random_range(-0.5..1.5)];
        assert!(model.predict(&t).1 >= 0.0);
    }
}
