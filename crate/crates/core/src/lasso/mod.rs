//! Lasso estimation on standardized data with BIC-selected penalty.

mod path;
mod solver;
mod standardize;

pub use path::{bic, fit_path, lambda_max, lambda_path, select_bic, PathFit};
pub use solver::{coordinate_descent, kkt_violation, soft_threshold, CdResult, CdSolver};
pub use standardize::{standardize, Standardization, Standardized};

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LassoError {
    #[error("every design column is constant")]
    AllColumnsConstant,
    #[error("target has zero variance")]
    DegenerateTarget,
    #[error("at least 2 rows are needed, got {0}")]
    TooFewRows(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid lasso configuration: {0}")]
    InvalidConfig(String),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("coefficient report: {0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LassoConfig {
    pub n_lambdas: usize,
    pub lambda_min_ratio: f64,
    /// Largest coefficient change in a full sweep at which a fit stops.
    pub tolerance: f64,
    pub max_sweeps: usize,
    pub nonnegative: bool,
}

impl Default for LassoConfig {
    fn default() -> Self {
        Self {
            n_lambdas: 100,
            lambda_min_ratio: 1e-4,
            tolerance: 1e-7,
            max_sweeps: 10_000,
            nonnegative: false,
        }
    }
}

impl LassoConfig {
    pub fn nonnegative(mut self) -> Self {
        self.nonnegative = true;
        self
    }

    pub fn validate(&self) -> Result<(), LassoError> {
        if self.n_lambdas == 0 {
            return Err(LassoError::InvalidConfig("n_lambdas must be positive".into()));
        }
        if !(self.lambda_min_ratio > 0.0 && self.lambda_min_ratio < 1.0) {
            return Err(LassoError::InvalidConfig(format!(
                "lambda_min_ratio must lie in (0, 1), got {}",
                self.lambda_min_ratio
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(LassoError::InvalidConfig(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_sweeps == 0 {
            return Err(LassoError::InvalidConfig("max_sweeps must be positive".into()));
        }
        Ok(())
    }
}

/// A lasso path fit and its BIC selection.
#[derive(Debug, Clone, PartialEq)]
pub struct LassoFit {
    pub names: Vec<String>,
    pub standardization: Standardization,
    pub path: PathFit,
    pub selected: usize,
    pub intercept: f64,
    /// Original-scale coefficients at the selected lambda, one per column.
    pub coefficients: Vec<f64>,
    pub active_set: Vec<String>,
    /// In-sample fitted values at the selected lambda.
    pub fitted: Vec<f64>,
}

impl LassoFit {
    pub fn selected_lambda(&self) -> f64 {
        self.path.lambdas[self.selected]
    }

    /// Standardized coefficients over the retained columns.
    pub fn beta_std(&self, k: usize) -> &[f64] {
        &self.path.betas[k]
    }

    /// Intercept and original-scale coefficients at path index `k`.
    pub fn coefficients_at(&self, k: usize) -> (f64, Vec<f64>) {
        self.standardization.destandardize(&self.path.betas[k])
    }

    /// Writes `feature,beta_standardized,beta_original` rows preceded by
    /// `#` metadata lines for the selected lambda.
    pub fn write_report<W: Write>(&self, mut out: W) -> Result<(), LassoError> {
        let io = |e: std::io::Error| LassoError::Io(e.to_string());
        writeln!(out, "# selected_index={}", self.selected).map_err(io)?;
        writeln!(out, "# selected_lambda={}", self.selected_lambda()).map_err(io)?;
        writeln!(out, "# bic={}", self.path.bic[self.selected]).map_err(io)?;
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| LassoError::Io(e.to_string());
        w.write_record(["feature", "beta_standardized", "beta_original"])
            .map_err(csv_err)?;
        w.write_record(["(intercept)", "0", &self.intercept.to_string()])
            .map_err(csv_err)?;
        let mut std = vec![0.0; self.names.len()];
        for (k, &j) in self.standardization.retained.iter().enumerate() {
            std[j] = self.path.betas[self.selected][k];
        }
        for (j, name) in self.names.iter().enumerate() {
            w.write_record([name.as_str(), &std[j].to_string(), &self.coefficients[j].to_string()])
                .map_err(csv_err)?;
        }
        w.flush().map_err(io)
    }
}

/// Standardizes, fits the whole lambda path and selects by BIC.
pub fn fit_lasso(
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
    target: &[f64],
    cfg: &LassoConfig,
) -> Result<LassoFit, LassoError> {
    cfg.validate()?;
    if names.len() != columns.len() {
        return Err(LassoError::DimensionMismatch(format!(
            "{} names for {} columns",
            names.len(),
            columns.len()
        )));
    }
    if target.iter().any(|v| !v.is_finite()) {
        return Err(LassoError::NonFinite("target"));
    }
    if columns.iter().flatten().any(|v| !v.is_finite()) {
        return Err(LassoError::NonFinite("design"));
    }
    let (data, standardization) = standardize(columns, target)?;
    let path = fit_path(&data.x, &data.y, cfg)?;
    let selected = select_bic(&path.bic);
    let (intercept, coefficients) = standardization.destandardize(&path.betas[selected]);

    let mut fitted = vec![standardization.y_mean; target.len()];
    for (col, &b) in data.x.iter().zip(&path.betas[selected]) {
        if b != 0.0 {
            let scaled = b * standardization.y_scale;
            for (f, x) in fitted.iter_mut().zip(col) {
                *f += scaled * x;
            }
        }
    }
    let active_set = names
        .iter()
        .zip(&coefficients)
        .filter(|(_, &b)| b != 0.0)
        .map(|(n, _)| n.clone())
        .collect();
    Ok(LassoFit {
        names,
        standardization,
        path,
        selected,
        intercept,
        coefficients,
        active_set,
        fitted,
    })
}
