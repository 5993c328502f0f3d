//! The ARX conditional-mean model and the ARCH conditional-variance
//! model, estimated in two stages by lasso with BIC selection.

mod linear;

pub use linear::{CoefficientRow, LinearModel, LinearPredictor, Step};

use std::ops::Range;

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::{build_matrix, FeatureError, FeatureSpec, LagSets, Target};
use crate::lasso::{fit_lasso, LassoConfig, LassoError};
use crate::series::{CalendarContext, HolidayCalendar, SeriesError, TimeSeries};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("fit window too short: {needed} hours needed, {available} available")]
    WindowTooShort { needed: usize, available: usize },
    #[error("lag {lag} of index {index} is unavailable")]
    MissingLag { index: usize, lag: usize },
    #[error("calendar context does not match the series: {0}")]
    ContextMismatch(String),
    #[error("invalid model configuration: {0}")]
    InvalidConfig(String),
    #[error("model document: {0}")]
    Io(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Lasso(#[from] LassoError),
}

/// Response of the variance regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceTarget {
    /// Squared mean residuals; fitted values estimate `σ²`.
    #[default]
    Squared,
    /// Absolute mean residuals; fitted values estimate `σ`. The lagged
    /// regressors are then absolute residuals as well.
    Absolute,
}

impl VarianceTarget {
    pub fn transform(self, residual: f64) -> f64 {
        match self {
            VarianceTarget::Squared => residual * residual,
            VarianceTarget::Absolute => residual.abs(),
        }
    }

    /// Converts a fitted value to a variance, floored at `floor`.
    pub fn to_variance(self, fitted: f64, floor: f64) -> f64 {
        let v = match self {
            VarianceTarget::Squared => fitted,
            VarianceTarget::Absolute => fitted.max(0.0).powi(2),
        };
        v.max(floor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelConfig {
    pub mean_spec: FeatureSpec,
    pub variance_spec: FeatureSpec,
    pub mean_lasso: LassoConfig,
    /// Always run in nonnegative mode.
    pub variance_lasso: LassoConfig,
    pub variance_target: VarianceTarget,
    /// `σ²` floor as a multiple of the sample variance of the residuals.
    pub sigma_floor_ratio: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self::from_lags(&LagSets::default())
    }
}

impl ModelConfig {
    pub fn from_lags(lags: &LagSets) -> Self {
        Self {
            mean_spec: FeatureSpec::mean(lags),
            variance_spec: FeatureSpec::variance(lags),
            mean_lasso: LassoConfig::default(),
            variance_lasso: LassoConfig::default().nonnegative(),
            variance_target: VarianceTarget::Squared,
            sigma_floor_ratio: 1e-6,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        self.mean_spec.validate()?;
        self.variance_spec.validate()?;
        self.mean_lasso.validate()?;
        self.variance_lasso.validate()?;
        if self.mean_spec.target != Target::Mean || self.variance_spec.target != Target::Variance {
            return Err(ModelError::InvalidConfig(
                "mean and variance specs have swapped targets".into(),
            ));
        }
        if !(self.sigma_floor_ratio > 0.0) {
            return Err(ModelError::InvalidConfig(
                "sigma_floor_ratio must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Shortest fit window for which both regressions have more rows than
    /// columns.
    pub fn min_window(&self, calendar: &HolidayCalendar) -> usize {
        let mean_width = self.mean_spec.terms(calendar).len();
        let var_width = self.variance_spec.terms(calendar).len();
        let mean_lag = self.mean_spec.max_lag();
        (mean_lag + mean_width + 1).max(mean_lag + self.variance_spec.max_lag() + var_width + 1)
    }
}

/// Conditional-mean model with its in-sample residuals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanModel {
    pub linear: LinearModel,
    pub spec: FeatureSpec,
    /// Calendar indices of the data the model was fitted on.
    pub window: Range<usize>,
    /// Calendar index of the first regression row.
    pub first_row: usize,
    pub residuals: Vec<f64>,
}

/// Conditional-variance model with fitted variances and the rescaled
/// standardized-innovation pool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceModel {
    pub linear: LinearModel,
    pub spec: FeatureSpec,
    pub target: VarianceTarget,
    pub first_row: usize,
    pub sigma_floor: f64,
    pub sigma2: Vec<f64>,
    pub innovations: Vec<f64>,
}

impl MeanModel {
    /// In-sample fitted values.
    pub fn fitted(&self, values: &[f64]) -> Vec<f64> {
        let skip = self.first_row - self.window.start;
        values[skip..]
            .iter()
            .zip(&self.residuals)
            .map(|(y, e)| y - e)
            .collect()
    }
}

impl VarianceModel {
    /// Variance at `t`; `residual(k)` is the mean residual at `t - k`.
    pub fn predict(
        &self,
        predictor: &LinearPredictor,
        ctx: &CalendarContext,
        t: usize,
        residual: impl Fn(usize) -> Option<f64>,
    ) -> Option<f64> {
        let target = self.target;
        let fitted = predictor.eval(ctx, t, |k| residual(k).map(|e| target.transform(e)))?;
        Some(target.to_variance(fitted, self.sigma_floor))
    }
}

fn check_context(series: &TimeSeries, ctx: &CalendarContext) -> Result<(), ModelError> {
    if series.start() != ctx.start() {
        return Err(ModelError::ContextMismatch(format!(
            "series starts at {}, calendar at {}",
            series.start(),
            ctx.start()
        )));
    }
    Ok(())
}

/// Lasso-BIC fit of the mean regression on `values`, which hold the
/// series at calendar indices `offset..offset + values.len()`.
pub fn fit_mean(
    values: &[f64],
    offset: usize,
    ctx: &CalendarContext,
    spec: &FeatureSpec,
    cfg: &LassoConfig,
) -> Result<MeanModel, ModelError> {
    let width = spec.terms(ctx.calendar()).len();
    let needed = spec.max_lag() + width + 1;
    if values.len() < needed {
        return Err(ModelError::WindowTooShort {
            needed,
            available: values.len(),
        });
    }
    let m = build_matrix(spec, ctx, values, offset, values)?;
    let fit = fit_lasso(m.names, m.columns, &m.target, cfg)?;
    let residuals = m.target.iter().zip(&fit.fitted).map(|(y, f)| y - f).collect();
    Ok(MeanModel {
        linear: LinearModel::from_fit(fit, m.terms, spec.spline),
        spec: spec.clone(),
        window: offset..offset + values.len(),
        first_row: m.rows[0],
        residuals,
    })
}

/// Nonnegative lasso-BIC fit of the transformed mean residuals.
pub fn fit_variance(
    mean: &MeanModel,
    ctx: &CalendarContext,
    spec: &FeatureSpec,
    cfg: &LassoConfig,
    target: VarianceTarget,
    sigma_floor_ratio: f64,
) -> Result<VarianceModel, ModelError> {
    let width = spec.terms(ctx.calendar()).len();
    let needed = spec.max_lag() + width + 1;
    if mean.residuals.len() < needed {
        return Err(ModelError::WindowTooShort {
            needed: needed + mean.first_row - mean.window.start,
            available: mean.window.len(),
        });
    }
    let source: Vec<f64> = mean.residuals.iter().map(|&e| target.transform(e)).collect();
    let m = build_matrix(spec, ctx, &source, mean.first_row, &source)?;
    let cfg = cfg.clone().nonnegative();
    let fit = fit_lasso(m.names, m.columns, &m.target, &cfg)?;

    let n = mean.residuals.len() as f64;
    let e_mean = mean.residuals.iter().sum::<f64>() / n;
    let e_var = mean.residuals.iter().map(|e| (e - e_mean).powi(2)).sum::<f64>() / n;
    let sigma_floor = sigma_floor_ratio * e_var;

    let sigma2: Vec<f64> = fit
        .fitted
        .iter()
        .map(|&f| target.to_variance(f, sigma_floor))
        .collect();
    let skip = m.rows[0] - mean.first_row;
    let mut innovations: Vec<f64> = mean.residuals[skip..]
        .iter()
        .zip(&sigma2)
        .map(|(e, s2)| e / s2.sqrt())
        .collect();
    let zn = innovations.len() as f64;
    let z_mean = innovations.iter().sum::<f64>() / zn;
    let z_sd = (innovations.iter().map(|z| (z - z_mean).powi(2)).sum::<f64>() / zn).sqrt();
    if z_sd > 0.0 {
        innovations.iter_mut().for_each(|z| *z /= z_sd);
    }
    Ok(VarianceModel {
        linear: LinearModel::from_fit(fit, m.terms, spec.spline),
        spec: spec.clone(),
        target,
        first_row: m.rows[0],
        sigma_floor,
        sigma2,
        innovations,
    })
}

/// Deterministic mean prediction at `t` from observed history. `history`
/// holds the series from calendar index 0.
pub fn predict_mean_one_step(
    predictor: &LinearPredictor,
    ctx: &CalendarContext,
    history: &TimeSeries,
    t: usize,
) -> Result<f64, ModelError> {
    let missing = std::cell::Cell::new(None);
    let value = predictor.eval(ctx, t, |k| {
        let v = if k <= t { history.get(t - k) } else { None };
        if v.is_none() {
            missing.set(Some(k));
        }
        v
    });
    value.ok_or(ModelError::MissingLag {
        index: t,
        lag: missing.get().unwrap_or(0),
    })
}

/// The full two-stage model plus what is needed to rebuild its calendar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandModel {
    pub config: ModelConfig,
    pub calendar: HolidayCalendar,
    pub calendar_start: NaiveDateTime,
    pub base_year: i32,
    pub mean: MeanModel,
    pub variance: VarianceModel,
}

impl DemandModel {
    /// Fits both stages on calendar indices `window` of `series`.
    pub fn fit(
        series: &TimeSeries,
        ctx: &CalendarContext,
        window: Range<usize>,
        config: &ModelConfig,
    ) -> Result<Self, ModelError> {
        config.validate()?;
        check_context(series, ctx)?;
        let needed = config.min_window(ctx.calendar());
        if window.len() < needed {
            return Err(ModelError::WindowTooShort {
                needed,
                available: window.len(),
            });
        }
        let values = series.window(window.clone())?;
        let mean = fit_mean(&values, window.start, ctx, &config.mean_spec, &config.mean_lasso)?;
        let variance = fit_variance(
            &mean,
            ctx,
            &config.variance_spec,
            &config.variance_lasso,
            config.variance_target,
            config.sigma_floor_ratio,
        )?;
        Ok(Self {
            config: config.clone(),
            calendar: ctx.calendar().clone(),
            calendar_start: ctx.start(),
            base_year: ctx.base_year(),
            mean,
            variance,
        })
    }

    /// Calendar context of `len` hours aligned with the fitted one.
    pub fn context(&self, len: usize) -> CalendarContext {
        CalendarContext::new(self.calendar_start, len, self.calendar.clone(), self.base_year)
    }

    /// Mean residuals `Y_t - μ̂_t` at calendar indices `range`, computed
    /// from one-step predictions on the observed history.
    pub fn one_step_residuals(
        &self,
        predictor: &LinearPredictor,
        ctx: &CalendarContext,
        history: &TimeSeries,
        range: Range<usize>,
    ) -> Result<Vec<f64>, ModelError> {
        range
            .map(|t| {
                let y = history
                    .get(t)
                    .ok_or(ModelError::MissingLag { index: t, lag: 0 })?;
                Ok(y - predict_mean_one_step(predictor, ctx, history, t)?)
            })
            .collect()
    }

    pub fn parameter_count(&self) -> usize {
        self.mean.linear.active_set().len() + self.variance.linear.active_set().len() + 2
    }

    pub fn to_json(&self) -> Result<String, ModelError> {
        serde_json::to_string_pretty(self).map_err(|e| ModelError::Io(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        serde_json::from_str(text).map_err(|e| ModelError::Io(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{Block, Family};
    use chrono::NaiveDate;

    fn start() -> NaiveDateTime {
        NaiveDate::from_ymd_opt(2015, 1, 5)
            .unwrap()
            .and_hms_opt(0, 0, 0)
            .unwrap()
    }

    fn small_config() -> ModelConfig {
        ModelConfig::from_lags(&LagSets {
            mean: vec![1, 2, 24, 168],
            variance: vec![1, 2],
            interaction: vec![1],
        })
    }

    #[test]
    fn variance_target_transforms() {
        assert_eq!(VarianceTarget::Squared.transform(-3.0), 9.0);
        assert_eq!(VarianceTarget::Absolute.transform(-3.0), 3.0);
        assert_eq!(VarianceTarget::Squared.to_variance(-1.0, 0.5), 0.5);
        assert_eq!(VarianceTarget::Absolute.to_variance(2.0, 0.5), 4.0);
    }

    #[test]
    fn deterministic_series_is_fit_exactly() {
        let n = 24 * 7 * 12;
        let values: Vec<f64> = (0..n)
            .map(|t| 100.0 + if t % 24 >= 12 { 5.0 } else { 0.0 } + (t % 168 / 24) as f64)
            .collect();
        let ctx = CalendarContext::for_series(start(), n, HolidayCalendar::empty());
        let spec = FeatureSpec {
            target: Target::Mean,
            spline: Default::default(),
            blocks: vec![Block::Constant, Block::HourOfWeek],
        };
        // exact representability needs the path to reach a negligible penalty
        let cfg = LassoConfig {
            lambda_min_ratio: 1e-10,
            tolerance: 1e-11,
            ..LassoConfig::default()
        };
        let m = fit_mean(&values, 0, &ctx, &spec, &cfg).unwrap();
        let worst = m.residuals.iter().map(|e| e.abs()).fold(0.0, f64::max);
        assert!(worst <= 1e-6, "{worst}");
    }

    #[test]
    fn missing_value_is_rejected() {
        let n = 3000;
        let mut values: Vec<Option<f64>> = (0..n).map(|t| Some((t % 24) as f64)).collect();
        values[1500] = None;
        let series = TimeSeries::new(start(), values).unwrap();
        let ctx = CalendarContext::for_series(start(), n, HolidayCalendar::empty());
        let err = DemandModel::fit(&series, &ctx, 0..n, &small_config()).unwrap_err();
        assert!(matches!(err, ModelError::Series(SeriesError::MissingInWindow { .. })));
    }

    #[test]
    fn short_window_is_rejected() {
        let series = TimeSeries::from_values(start(), vec![1.0; 300]).unwrap();
        let ctx = CalendarContext::for_series(start(), 300, HolidayCalendar::empty());
        let err = DemandModel::fit(&series, &ctx, 0..300, &small_config()).unwrap_err();
        assert!(matches!(err, ModelError::WindowTooShort { .. }));
    }

    #[test]
    fn zero_residuals_are_degenerate_for_variance() {
        let n = 24 * 7 * 6;
        let values: Vec<f64> = (0..n).map(|t| (t % 24) as f64).collect();
        let ctx = CalendarContext::for_series(start(), n, HolidayCalendar::empty());
        let mut mean = fit_mean(
            &values,
            0,
            &ctx,
            &FeatureSpec::mean(&LagSets::none()),
            &LassoConfig::default(),
        )
        .unwrap();
        mean.residuals.iter_mut().for_each(|e| *e = 0.0);
        let err = fit_variance(
            &mean,
            &ctx,
            &FeatureSpec::variance(&LagSets::none()),
            &LassoConfig::default(),
            VarianceTarget::Squared,
            1e-6,
        )
        .unwrap_err();
        assert_eq!(err, ModelError::Lasso(LassoError::DegenerateTarget));
    }

    #[test]
    fn report_partitions_into_families() {
        let n = 24 * 7 * 8;
        let values: Vec<f64> = (0..n)
            .map(|t| 50.0 + (t % 24) as f64 + ((t * 7919) % 13) as f64 * 0.1)
            .collect();
        let series = TimeSeries::from_values(start(), values).unwrap();
        let ctx = CalendarContext::for_series(start(), n, HolidayCalendar::german_default());
        let model = DemandModel::fit(&series, &ctx, 0..n, &small_config()).unwrap();
        let rows = model.mean.linear.report();
        assert_eq!(rows.len(), model.mean.linear.names.len() + 1);
        let families: std::collections::BTreeSet<Family> = rows.iter().map(|r| r.family).collect();
        assert!(families.contains(&Family::Autoregressive));
        assert!(families.contains(&Family::Interaction));
        assert!(!families.contains(&Family::Arch));
        assert!(model.variance.linear.coefficients.iter().all(|&b| b >= 0.0));
    }
}
