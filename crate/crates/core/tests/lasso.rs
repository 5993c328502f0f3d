use hydrocast::lasso::{fit_lasso, fit_path, kkt_violation, standardize, LassoConfig};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn gaussian_columns(rng: &mut ChaCha8Rng, p: usize, n: usize) -> Vec<Vec<f64>> {
    (0..p)
        .map(|_| (0..n).map(|_| rng.sample(StandardNormal)).collect())
        .collect()
}

fn names(p: usize) -> Vec<String> {
    (0..p).map(|j| format!("x{j}")).collect()
}

fn objective(x: &[Vec<f64>], y: &[f64], beta: &[f64], lambda: f64) -> f64 {
    let n = y.len() as f64;
    let rss: f64 = (0..y.len())
        .map(|i| {
            let f: f64 = x.iter().zip(beta).map(|(c, b)| c[i] * b).sum();
            (y[i] - f).powi(2)
        })
        .sum();
    rss / (2.0 * n) + lambda * beta.iter().map(|b| b.abs()).sum::<f64>()
}

/// Accelerated proximal gradient, run to a tight fixed point.
fn fista(x: &[Vec<f64>], y: &[f64], lambda: f64, nonneg: bool) -> Vec<f64> {
    let n = y.len();
    let p = x.len();
    let xm = DMatrix::from_fn(n, p, |i, j| x[j][i]);
    let yv = DVector::from_column_slice(y);
    let gram = xm.transpose() * &xm / n as f64;
    let xty = xm.transpose() * &yv / n as f64;
    let step = 1.0 / gram.symmetric_eigenvalues().max();
    let prox = |z: f64| {
        let s = z.signum() * (z.abs() - step * lambda).max(0.0);
        if nonneg {
            s.max(0.0)
        } else {
            s
        }
    };
    let mut beta = DVector::zeros(p);
    let mut v = beta.clone();
    let mut t = 1.0_f64;
    for _ in 0..200_000 {
        let grad = &gram * &v - &xty;
        let next = (&v - step * grad).map(prox);
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        v = &next + (&next - &beta) * ((t - 1.0) / t_next);
        let change = (&next - &beta).amax();
        beta = next;
        t = t_next;
        if change < 1e-14 {
            break;
        }
    }
    beta.iter().copied().collect()
}

#[test]
fn path_matches_proximal_gradient_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for problem in 0..12 {
        let p = 2 + problem % 7;
        let n = 40 + 5 * problem;
        let cols = gaussian_columns(&mut rng, p, n);
        let y: Vec<f64> = (0..n)
            .map(|i| cols[0][i] - 0.5 * cols[1][i] + rng.sample::<f64, _>(StandardNormal))
            .collect();
        let (data, _) = standardize(cols, &y).unwrap();
        for nonneg in [false, true] {
            let cfg = LassoConfig {
                n_lambdas: 20,
                nonnegative: nonneg,
                ..Default::default()
            };
            let fit = fit_path(&data.x, &data.y, &cfg).unwrap();
            for (lambda, beta) in fit.lambdas.iter().zip(&fit.betas) {
                let oracle = fista(&data.x, &data.y, *lambda, nonneg);
                let ours = objective(&data.x, &data.y, beta, *lambda);
                let best = objective(&data.x, &data.y, &oracle, *lambda);
                assert!(ours - best < 1e-6, "problem {problem}: {ours} vs {best}");
                assert!(kkt_violation(&data.x, &data.y, beta, *lambda, nonneg) <= 10.0 * cfg.tolerance);
                if nonneg {
                    assert!(beta.iter().all(|&b| b >= 0.0));
                }
            }
        }
    }
}

/// Best subset of size at most 3 by OLS BIC, found by enumeration.
fn best_subset(cols: &[Vec<f64>], y: &[f64]) -> Vec<usize> {
    let n = y.len();
    let p = cols.len();
    let ybar = y.iter().sum::<f64>() / n as f64;
    let design = DMatrix::from_fn(n, p + 1, |i, j| if j == 0 { 1.0 } else { cols[j - 1][i] });
    let gram = design.transpose() * &design;
    let xty = design.transpose() * DVector::from_column_slice(y);
    let yy: f64 = y.iter().map(|v| v * v).sum();
    let rss_of = |subset: &[usize]| -> f64 {
        if subset.is_empty() {
            return y.iter().map(|v| (v - ybar).powi(2)).sum();
        }
        let idx: Vec<usize> = std::iter::once(0).chain(subset.iter().map(|j| j + 1)).collect();
        let g = DMatrix::from_fn(idx.len(), idx.len(), |a, b| gram[(idx[a], idx[b])]);
        let r = DVector::from_iterator(idx.len(), idx.iter().map(|&a| xty[a]));
        let b = g.cholesky().unwrap().solve(&r);
        yy - b.dot(&r)
    };
    let bic = |subset: &[usize]| {
        n as f64 * (rss_of(subset) / n as f64).max(1e-300).ln() + subset.len() as f64 * (n as f64).ln()
    };
    let mut best = (bic(&[]), vec![]);
    for a in 0..p {
        let s = [a];
        if bic(&s) < best.0 {
            best = (bic(&s), s.to_vec());
        }
        for b in a + 1..p {
            let s = [a, b];
            if bic(&s) < best.0 {
                best = (bic(&s), s.to_vec());
            }
            for c in b + 1..p {
                let s = [a, b, c];
                if bic(&s) < best.0 {
                    best = (bic(&s), s.to_vec());
                }
            }
        }
    }
    best.1
}

#[test]
fn sparse_support_agrees_with_best_subset() {
    // BIC only separates the true support from chance regressors once
    // ln n dominates the gain from reducing shrinkage bias
    let (n, p) = (50_000, 50);
    for seed in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let cols = gaussian_columns(&mut rng, p, n);
        let y: Vec<f64> = (0..n)
            .map(|i| 2.0 * cols[3][i] - 1.5 * cols[17][i] + 0.01 * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let oracle: Vec<String> = best_subset(&cols, &y).iter().map(|j| format!("x{j}")).collect();
        let fit = fit_lasso(names(p), cols, &y, &LassoConfig::default()).unwrap();
        // the enumerated optimum may add one chance regressor, never drop a true one
        assert!(oracle.len() <= 3 && ["x3", "x17"].iter().all(|t| oracle.iter().any(|o| o == t)), "seed {seed}: {oracle:?}");
        assert_eq!(fit.active_set, ["x3", "x17"], "seed {seed}");
    }
}

#[test]
fn pure_noise_mostly_selects_empty_model() {
    let (n, p) = (200, 20);
    let mut empty = 0;
    for seed in 0..100 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cols = gaussian_columns(&mut rng, p, n);
        let y: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let fit = fit_lasso(names(p), cols, &y, &LassoConfig::default()).unwrap();
        if fit.active_set.is_empty() {
            empty += 1;
        }
    }
    assert!(empty > 50, "{empty}/100");
}

#[test]
fn fitted_values_match_original_scale_coefficients() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 120;
    let mut cols = gaussian_columns(&mut rng, 6, n);
    for v in cols[2].iter_mut() {
        *v = *v * 30.0 + 500.0;
    }
    cols.push(vec![7.0; n]);
    let y: Vec<f64> = (0..n).map(|i| 3.0 + 0.2 * cols[2][i] - cols[4][i] + 0.1 * rng.sample::<f64, _>(StandardNormal)).collect();
    let fit = fit_lasso(names(7), cols.clone(), &y, &LassoConfig::default()).unwrap();
    assert_eq!(fit.coefficients[6], 0.0);
    for i in 0..n {
        let f = fit.intercept + cols.iter().zip(&fit.coefficients).map(|(c, b)| c[i] * b).sum::<f64>();
        assert!((f - fit.fitted[i]).abs() < 1e-9 * (1.0 + f.abs()));
    }
}
