use std::io::Write;

use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::features::{Family, PeriodicBasis, SplineBasisConfig, Term};
use crate::lasso::{LassoFit, Standardization};
use crate::series::CalendarContext;

/// Lasso-estimated linear regression on named feature terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub names: Vec<String>,
    pub terms: Vec<Term>,
    pub intercept: f64,
    /// Original-scale coefficients, one per term.
    pub coefficients: Vec<f64>,
    pub spline: SplineBasisConfig,
    pub standardization: Standardization,
    pub selected_lambda: f64,
    pub bic: f64,
    pub converged: bool,
}

/// One line of a coefficient report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientRow {
    pub name: String,
    pub family: Family,
    pub beta_standardized: f64,
    pub beta_original: f64,
}

impl LinearModel {
    pub(crate) fn from_fit(fit: LassoFit, terms: Vec<Term>, spline: SplineBasisConfig) -> Self {
        Self {
            selected_lambda: fit.selected_lambda(),
            bic: fit.path.bic[fit.selected],
            converged: fit.path.all_converged(),
            names: fit.names,
            terms,
            intercept: fit.intercept,
            coefficients: fit.coefficients,
            spline,
            standardization: fit.standardization,
        }
    }

    pub fn active_set(&self) -> Vec<&str> {
        self.names
            .iter()
            .zip(&self.coefficients)
            .filter(|(_, &b)| b != 0.0)
            .map(|(n, _)| n.as_str())
            .collect()
    }

    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|j| self.coefficients[j])
    }

    pub fn predictor(&self) -> Result<LinearPredictor, ModelError> {
        Ok(LinearPredictor {
            intercept: self.intercept,
            active: self
                .terms
                .iter()
                .zip(&self.coefficients)
                .filter(|(_, &b)| b != 0.0)
                .map(|(t, &b)| (*t, b))
                .collect(),
            basis: PeriodicBasis::new(self.spline)?,
        })
    }

    /// Intercept row followed by one row per term, each tagged with its
    /// model component.
    pub fn report(&self) -> Vec<CoefficientRow> {
        let s = &self.standardization;
        let mut std = vec![0.0; self.names.len()];
        for (k, &j) in s.retained.iter().enumerate() {
            std[j] = self.coefficients[j] * s.x_scale[k] / s.y_scale;
        }
        let mut rows = vec![CoefficientRow {
            name: "(intercept)".into(),
            family: Family::Constant,
            beta_standardized: 0.0,
            beta_original: self.intercept,
        }];
        rows.extend(self.names.iter().enumerate().map(|(j, name)| CoefficientRow {
            name: name.clone(),
            family: self.terms[j].family(),
            beta_standardized: std[j],
            beta_original: self.coefficients[j],
        }));
        rows
    }

    /// CSV `feature,beta_standardized,beta_original` preceded by `#`
    /// metadata lines.
    pub fn write_report<W: Write>(&self, mut out: W) -> Result<(), ModelError> {
        let io = |e: std::io::Error| ModelError::Io(e.to_string());
        writeln!(out, "# selected_lambda={}", self.selected_lambda).map_err(io)?;
        writeln!(out, "# bic={}", self.bic).map_err(io)?;
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| ModelError::Io(e.to_string());
        w.write_record(["feature", "beta_standardized", "beta_original"])
            .map_err(csv_err)?;
        for row in self.report() {
            w.write_record([
                row.name.as_str(),
                &row.beta_standardized.to_string(),
                &row.beta_original.to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.flush().map_err(io)
    }
}

/// Evaluates a fitted linear model over its nonzero terms only.
#[derive(Debug, Clone)]
pub struct LinearPredictor {
    intercept: f64,
    active: Vec<(Term, f64)>,
    basis: PeriodicBasis,
}

impl LinearPredictor {
    /// Prediction at calendar index `t`; `lagged(k)` supplies the lag
    /// source at `t - k`. `None` when a needed lag is unavailable.
    pub fn eval(
        &self,
        ctx: &CalendarContext,
        t: usize,
        lagged: impl Fn(usize) -> Option<f64>,
    ) -> Option<f64> {
        let mut acc = self.intercept;
        for (term, b) in &self.active {
            acc += b * term.value(ctx, t, &self.basis, &lagged)?;
        }
        Some(acc)
    }

    /// Largest lag read by a nonzero term.
    pub fn max_lag(&self) -> usize {
        self.active.iter().filter_map(|(t, _)| t.lag()).max().unwrap_or(0)
    }
}

/// Prediction at a fixed index split into its deterministic part and
/// per-lag weights, so many paths can share the calendar evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub base: f64,
    /// `(lag, weight)` with weights of equal lags merged.
    pub lags: Vec<(usize, f64)>,
}

impl Step {
    pub fn apply(&self, lagged: impl Fn(usize) -> f64) -> f64 {
        self.lags.iter().fold(self.base, |acc, &(k, w)| acc + w * lagged(k))
    }
}

impl LinearPredictor {
    pub fn step(&self, ctx: &CalendarContext, t: usize) -> Step {
        let mut base = self.intercept;
        let mut lags: Vec<(usize, f64)> = Vec::new();
        for (term, b) in &self.active {
            let factor = term.calendar_factor(ctx, t, &self.basis);
            match term.lag() {
                None => base += b * factor,
                Some(_) if factor == 0.0 => {}
                Some(k) => match lags.iter_mut().find(|(l, _)| *l == k) {
                    Some(entry) => entry.1 += b * factor,
                    None => lags.push((k, b * factor)),
                },
            }
        }
        Step { base, lags }
    }
}
