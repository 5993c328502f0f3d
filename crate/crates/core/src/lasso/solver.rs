use rayon::prelude::*;

use super::{LassoConfig, LassoError};

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let i = 4 * c;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut tail = 0.0;
    for i in 4 * chunks..a.len() {
        tail += a[i] * b[i];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

pub fn soft_threshold(z: f64, lambda: f64) -> f64 {
    if z > lambda {
        z - lambda
    } else if z < -lambda {
        z + lambda
    } else {
        0.0
    }
}

/// Outcome of minimizing the lasso objective at one penalty value.
#[derive(Debug, Clone, PartialEq)]
pub struct CdResult {
    pub beta: Vec<f64>,
    pub sweeps: usize,
    /// False when `max_sweeps` ran out before the tolerance was met; `beta`
    /// is then the last iterate.
    pub converged: bool,
    /// Objective before the first sweep and after every sweep.
    pub objective: Vec<f64>,
}

/// Covariance-mode cyclic coordinate descent.
///
/// Keeps the gradient `g_j = x_jᵀr/n` up to date through Gram columns
/// `Xᵀx_k/n`, which are computed lazily the first time coordinate `k`
/// moves. Reusing one solver along a lambda path gives warm starts and
/// shares the Gram cache.
pub struct CdSolver<'a> {
    x: &'a [Vec<f64>],
    n: usize,
    nonnegative: bool,
    tolerance: f64,
    max_sweeps: usize,
    yy: f64,
    xty: Vec<f64>,
    diag: Vec<f64>,
    gram: Vec<Option<Vec<f64>>>,
    grad: Vec<f64>,
    beta: Vec<f64>,
}

impl<'a> CdSolver<'a> {
    pub fn new(x: &'a [Vec<f64>], y: &[f64], cfg: &LassoConfig) -> Result<Self, LassoError> {
        cfg.validate()?;
        let n = y.len();
        if n == 0 {
            return Err(LassoError::TooFewRows(0));
        }
        if let Some(bad) = x.iter().position(|c| c.len() != n) {
            return Err(LassoError::DimensionMismatch(format!(
                "column {bad} has {} rows, target has {n}",
                x[bad].len()
            )));
        }
        let nf = n as f64;
        let xty: Vec<f64> = x.par_iter().map(|c| dot(c, y) / nf).collect();
        let diag: Vec<f64> = x.par_iter().map(|c| dot(c, c) / nf).collect();
        if let Some(j) = diag.iter().position(|&d| d <= 0.0 || !d.is_finite()) {
            return Err(LassoError::DimensionMismatch(format!("column {j} has zero norm")));
        }
        Ok(Self {
            x,
            n,
            nonnegative: cfg.nonnegative,
            tolerance: cfg.tolerance,
            max_sweeps: cfg.max_sweeps,
            yy: dot(y, y) / nf,
            grad: xty.clone(),
            xty,
            diag,
            gram: vec![None; x.len()],
            beta: vec![0.0; x.len()],
        })
    }

    /// Replaces the current iterate.
    pub fn set_beta(&mut self, beta: &[f64]) {
        assert_eq!(beta.len(), self.beta.len());
        for (k, &b) in beta.iter().enumerate() {
            let delta = b - self.beta[k];
            if delta != 0.0 {
                self.move_coordinate(k, delta);
            }
        }
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    /// `x_jᵀr/n` for the current iterate.
    pub fn gradient(&self) -> &[f64] {
        &self.grad
    }

    fn gram_column(&mut self, k: usize) -> &[f64] {
        if self.gram[k].is_none() {
            let xk = &self.x[k];
            let nf = self.n as f64;
            let col = self.x.par_iter().map(|c| dot(c, xk) / nf).collect();
            self.gram[k] = Some(col);
        }
        self.gram[k].as_deref().unwrap()
    }

    fn move_coordinate(&mut self, k: usize, delta: f64) {
        self.beta[k] += delta;
        self.gram_column(k);
        let col = self.gram[k].as_deref().unwrap();
        for (g, c) in self.grad.iter_mut().zip(col) {
            *g -= delta * c;
        }
    }

    /// `(1/(2n))‖y − Xβ‖² + λ‖β‖₁` from the maintained gradient.
    pub fn objective(&self, lambda: f64) -> f64 {
        let mut rss_n = self.yy;
        let mut l1 = 0.0;
        for j in 0..self.beta.len() {
            let b = self.beta[j];
            if b != 0.0 {
                rss_n -= b * (self.xty[j] + self.grad[j]);
                l1 += b.abs();
            }
        }
        0.5 * rss_n.max(0.0) + lambda * l1
    }

    /// Largest violation of the optimality conditions at `lambda`, from
    /// the maintained gradient.
    pub fn kkt_violation(&self, lambda: f64) -> f64 {
        self.grad
            .iter()
            .zip(&self.beta)
            .map(|(&g, &b)| {
                if b != 0.0 {
                    (g - lambda * b.signum()).abs()
                } else if self.nonnegative {
                    (g - lambda).max(0.0)
                } else {
                    (g.abs() - lambda).max(0.0)
                }
            })
            .fold(0.0, f64::max)
    }

    fn sweep(&mut self, lambda: f64, active_only: bool) -> f64 {
        let mut max_change: f64 = 0.0;
        for j in 0..self.beta.len() {
            let old = self.beta[j];
            if active_only && old == 0.0 {
                continue;
            }
            let d = self.diag[j];
            let z = self.grad[j] + d * old;
            let mut new = soft_threshold(z, lambda) / d;
            if self.nonnegative {
                new = new.max(0.0);
            }
            let delta = new - old;
            if delta != 0.0 {
                self.move_coordinate(j, delta);
                max_change = max_change.max(delta.abs());
            }
        }
        max_change
    }

    /// Minimizes the objective at `lambda` starting from the current
    /// iterate. Full sweeps alternate with sweeps over the nonzero
    /// coordinates; the loop ends after a full sweep whose largest
    /// coefficient change, or whose optimality violation, is below the
    /// tolerance. The second test matters for collinear designs, where
    /// coefficients keep drifting along directions of constant objective.
    pub fn solve(&mut self, lambda: f64) -> CdResult {
        let mut objective = vec![self.objective(lambda)];
        let mut sweeps = 0;
        let mut converged = false;
        while sweeps < self.max_sweeps {
            let change = self.sweep(lambda, false);
            sweeps += 1;
            objective.push(self.objective(lambda));
            if change < self.tolerance || self.kkt_violation(lambda) <= self.tolerance {
                converged = true;
                break;
            }
            while sweeps < self.max_sweeps {
                let change = self.sweep(lambda, true);
                sweeps += 1;
                objective.push(self.objective(lambda));
                if change < self.tolerance || self.kkt_violation(lambda) <= self.tolerance {
                    break;
                }
            }
        }
        CdResult {
            beta: self.beta.clone(),
            sweeps,
            converged,
            objective,
        }
    }
}

/// Minimizes `(1/(2n))‖y − Xβ‖² + λ‖β‖₁` (subject to `β ≥ 0` in
/// nonnegative mode) from `warm_start`. `x` holds columns.
pub fn coordinate_descent(
    x: &[Vec<f64>],
    y: &[f64],
    lambda: f64,
    warm_start: &[f64],
    cfg: &LassoConfig,
) -> Result<CdResult, LassoError> {
    if !(lambda >= 0.0) {
        return Err(LassoError::InvalidConfig(format!("lambda must be >= 0, got {lambda}")));
    }
    if warm_start.len() != x.len() {
        return Err(LassoError::DimensionMismatch(format!(
            "warm start has {} entries for {} columns",
            warm_start.len(),
            x.len()
        )));
    }
    let mut solver = CdSolver::new(x, y, cfg)?;
    if cfg.nonnegative && warm_start.iter().any(|&b| b < 0.0) {
        return Err(LassoError::InvalidConfig("negative warm start in nonnegative mode".into()));
    }
    solver.set_beta(warm_start);
    Ok(solver.solve(lambda))
}

/// Largest violation of the lasso optimality conditions at `beta`.
pub fn kkt_violation(x: &[Vec<f64>], y: &[f64], beta: &[f64], lambda: f64, nonnegative: bool) -> f64 {
    let n = y.len() as f64;
    let mut r = y.to_vec();
    for (col, &b) in x.iter().zip(beta) {
        if b != 0.0 {
            for (ri, xi) in r.iter_mut().zip(col) {
                *ri -= b * xi;
            }
        }
    }
    x.iter()
        .zip(beta)
        .map(|(col, &b)| {
            let g = dot(col, &r) / n;
            if b != 0.0 {
                (g - lambda * b.signum()).abs()
            } else if nonnegative {
                (g - lambda).max(0.0)
            } else {
                (g.abs() - lambda).max(0.0)
            }
        })
        .fold(0.0, f64::max)
}
