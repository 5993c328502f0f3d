use super::solver::{dot, CdSolver};
use super::{LassoConfig, LassoError};

/// `max_j |x_jᵀy|/n`, the smallest penalty with an all-zero solution.
pub fn lambda_max(x: &[Vec<f64>], y: &[f64]) -> f64 {
    let n = y.len() as f64;
    x.iter().map(|c| dot(c, y).abs() / n).fold(0.0, f64::max)
}

/// Geometric grid from `lambda_max` down to `lambda_max * lambda_min_ratio`.
pub fn lambda_path(x: &[Vec<f64>], y: &[f64], cfg: &LassoConfig) -> Result<Vec<f64>, LassoError> {
    cfg.validate()?;
    let top = lambda_max(x, y);
    if cfg.n_lambdas == 1 {
        return Ok(vec![top]);
    }
    let last = (cfg.n_lambdas - 1) as f64;
    Ok((0..cfg.n_lambdas)
        .map(|k| top * cfg.lambda_min_ratio.powf(k as f64 / last))
        .collect())
}

/// `n ln(RSS/n) + df ln n`.
pub fn bic(n: usize, rss: f64, df: usize) -> f64 {
    let nf = n as f64;
    // A perfect fit would give -inf; floor keeps comparisons meaningful.
    nf * (rss / nf).max(1e-300).ln() + df as f64 * nf.ln()
}

/// Index of the smallest BIC; ties go to the earlier (larger) lambda.
pub fn select_bic(bic: &[f64]) -> usize {
    let mut best = 0;
    for (k, &b) in bic.iter().enumerate().skip(1) {
        if b < bic[best] {
            best = k;
        }
    }
    best
}

/// Solutions along a lambda path on standardized data.
#[derive(Debug, Clone, PartialEq)]
pub struct PathFit {
    pub lambdas: Vec<f64>,
    pub betas: Vec<Vec<f64>>,
    pub rss: Vec<f64>,
    pub df: Vec<usize>,
    pub bic: Vec<f64>,
    pub sweeps: Vec<usize>,
    pub converged: Vec<bool>,
    pub objective: Vec<Vec<f64>>,
}

impl PathFit {
    pub fn all_converged(&self) -> bool {
        self.converged.iter().all(|&c| c)
    }
}

fn residual_ss(x: &[Vec<f64>], y: &[f64], beta: &[f64]) -> f64 {
    let mut r = y.to_vec();
    for (col, &b) in x.iter().zip(beta) {
        if b != 0.0 {
            for (ri, xi) in r.iter_mut().zip(col) {
                *ri -= b * xi;
            }
        }
    }
    dot(&r, &r)
}

/// Fits every lambda of the path with warm starts and scores each fit by
/// BIC using the exact residual sum of squares.
pub fn fit_path(x: &[Vec<f64>], y: &[f64], cfg: &LassoConfig) -> Result<PathFit, LassoError> {
    let lambdas = lambda_path(x, y, cfg)?;
    let mut solver = CdSolver::new(x, y, cfg)?;
    let n = y.len();
    let mut fit = PathFit {
        lambdas: lambdas.clone(),
        betas: Vec::with_capacity(lambdas.len()),
        rss: Vec::with_capacity(lambdas.len()),
        df: Vec::with_capacity(lambdas.len()),
        bic: Vec::with_capacity(lambdas.len()),
        sweeps: Vec::with_capacity(lambdas.len()),
        converged: Vec::with_capacity(lambdas.len()),
        objective: Vec::with_capacity(lambdas.len()),
    };
    for &lambda in &lambdas {
        let res = solver.solve(lambda);
        let rss = residual_ss(x, y, &res.beta);
        let df = res.beta.iter().filter(|&&b| b != 0.0).count();
        fit.bic.push(bic(n, rss, df));
        fit.rss.push(rss);
        fit.df.push(df);
        fit.sweeps.push(res.sweeps);
        fit.converged.push(res.converged);
        fit.objective.push(res.objective);
        fit.betas.push(res.beta);
    }
    Ok(fit)
}
