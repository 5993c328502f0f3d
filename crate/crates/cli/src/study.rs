//! Rolling-origin forecasting studies.

use std::ops::Range;

use hydrocast::ensemble::{quantile_of_sorted, rank_correlation, rearrange, DependenceMode, EnsembleForecast};
use hydrocast::forecaster::{FittedForecaster, Forecaster};
use hydrocast::rng::derive_seed;
use hydrocast::scoring::{score_ensemble, ForecastScores, QuantileGrid, ScoreReport};
use hydrocast::series::{ingest_csv, make_study_plan, CalendarContext, TimeSeries};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{DataConfig, ModelEntry, StudyConfig};
use crate::error::{CliError, Result};
use crate::manifest::{Failure, Manifest, OutputDir};
use crate::report;

/// Nominal coverages of the central intervals tracked per horizon.
pub const INTERVALS: [f64; 3] = [0.5, 0.8, 0.9];

/// Levels of the fan-chart quantiles.
pub const FAN_LEVELS: [f64; 7] = [0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95];

pub const HISTOGRAM_BINS: usize = 40;

/// Observed series with its calendar.
#[derive(Debug, Clone)]
pub struct StudyData {
    pub series: TimeSeries,
    pub ctx: CalendarContext,
}

pub fn load_data(cfg: &DataConfig, extra_hours: usize) -> Result<StudyData> {
    let series = ingest_csv(&cfg.path, &cfg.schema())?;
    let ctx = CalendarContext::for_series(series.start(), series.len() + extra_hours, cfg.calendar()?);
    Ok(StudyData { series, ctx })
}

/// Seed of the forecast of `model` at `origin`; independent of the model
/// list order and of scheduling.
pub fn task_seed(seed: u64, model: &str, origin: usize) -> u64 {
    let digest = Sha256::digest(model.as_bytes());
    let mut label = [0u8; 8];
    label.copy_from_slice(&digest[..8]);
    derive_seed(seed, &[u64::from_le_bytes(label), origin as u64])
}

/// Estimation window for a forecast at `origin`.
pub fn fit_window(origin: usize, window_hours: Option<usize>) -> Range<usize> {
    match window_hours {
        Some(w) => origin.saturating_sub(w)..origin,
        None => 0..origin,
    }
}

/// Fits `entry` on the window before `origin` and simulates `m` paths.
pub fn forecast_at(
    entry: &ModelEntry,
    data: &StudyData,
    origin: usize,
    window_hours: Option<usize>,
    h: usize,
    m: usize,
    seed: u64,
) -> Result<(Box<dyn FittedForecaster>, EnsembleForecast), hydrocast::Error> {
    let fitted = entry
        .spec
        .forecaster()
        .fit(&data.series, &data.ctx, fit_window(origin, window_hours))?;
    let history = data.series.truncated(origin.min(data.series.len()))?;
    let ens = fitted.forecast(&history, &data.ctx, origin, h, m, seed)?;
    Ok((fitted, ens))
}

/// Realized values at `origin..origin + h`.
pub fn actuals(series: &TimeSeries, origin: usize, h: usize) -> Result<Vec<f64>> {
    (origin..origin + h)
        .map(|t| {
            series
                .get(t)
                .ok_or_else(|| CliError::Data(format!("no observed value at index {t} to score against")))
        })
        .collect()
}

/// Whether each realized value lies in the central intervals of
/// [`INTERVALS`]; `result[h][k]`.
pub fn interval_hits(ens: &EnsembleForecast, actuals: &[f64]) -> Vec<[bool; 3]> {
    actuals
        .iter()
        .enumerate()
        .map(|(h, y)| {
            let mut v = ens.hour(h);
            v.sort_by(f64::total_cmp);
            INTERVALS.map(|c| {
                let lo = quantile_of_sorted(&v, (1.0 - c) / 2.0);
                let hi = quantile_of_sorted(&v, (1.0 + c) / 2.0);
                lo <= *y && *y <= hi
            })
        })
        .collect()
}

/// Plot data of one forecast.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotData {
    pub mean: Vec<f64>,
    /// `fan[l][h]` for the levels of [`FAN_LEVELS`].
    pub fan: Vec<Vec<f64>>,
    pub rank_correlation: Vec<Vec<f64>>,
    pub histograms: Vec<(DependenceMode, Histogram)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

/// Histograms of the cumulative demand over `window` hours under every
/// dependence mode, on common bin edges.
pub fn cumulative_histograms(ens: &EnsembleForecast, window: usize) -> Result<Vec<(DependenceMode, Histogram)>> {
    let sums: Vec<(DependenceMode, Vec<f64>)> = DependenceMode::ALL
        .iter()
        .map(|&mode| Ok((mode, rearrange(ens, mode).cumulative_sums(window)?)))
        .collect::<Result<_>>()?;
    let all = sums.iter().flat_map(|(_, s)| s.iter().copied());
    let (lo, hi) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    let width = if hi > lo { (hi - lo) / HISTOGRAM_BINS as f64 } else { 1.0 };
    let edges: Vec<f64> = (0..=HISTOGRAM_BINS).map(|i| lo + i as f64 * width).collect();
    Ok(sums
        .into_iter()
        .map(|(mode, s)| {
            let mut counts = vec![0; HISTOGRAM_BINS];
            for x in s {
                let bin = (((x - lo) / width) as usize).min(HISTOGRAM_BINS - 1);
                counts[bin] += 1;
            }
            (
                mode,
                Histogram {
                    edges: edges.clone(),
                    counts,
                },
            )
        })
        .collect())
}

pub fn plot_data(ens: &EnsembleForecast, cumsum_window: usize) -> Result<PlotData> {
    Ok(PlotData {
        mean: ens.mean(),
        fan: hydrocast::ensemble::empirical_quantiles(ens, &FAN_LEVELS)?,
        rank_correlation: rank_correlation(ens),
        histograms: cumulative_histograms(ens, cumsum_window)?,
    })
}

/// Result of one `(model, origin)` task.
#[derive(Debug, Clone)]
pub struct TaskResult {
    pub model: usize,
    pub origin: usize,
    pub scores: ForecastScores,
    pub parameter_count: usize,
    pub hits: Vec<[bool; 3]>,
    pub plot: Option<PlotData>,
}

/// Aggregates of a completed study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyAggregate {
    pub seed: u64,
    pub horizon: usize,
    pub ensemble_size: usize,
    pub origins: Vec<usize>,
    pub report: ScoreReport,
    pub models: Vec<ModelAggregate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelAggregate {
    pub model: String,
    pub mean_parameters: f64,
    /// Empirical coverage of the central intervals, `coverage[k][h]`.
    pub interval_levels: Vec<f64>,
    pub coverage: Vec<Vec<f64>>,
}

#[derive(Debug)]
pub struct StudyOutcome {
    pub aggregate: Option<StudyAggregate>,
    pub manifest: Manifest,
}

/// Runs every model at every origin, scores the forecasts and writes the
/// report files. Failed tasks are listed in the manifest and the first
/// failure is returned after all other results are written.
pub fn run_study(cfg: &StudyConfig) -> Result<StudyOutcome> {
    cfg.validate()?;
    let seed = cfg.require_seed()?;
    let data = load_data(&cfg.data, 0)?;
    let h = cfg.horizon;
    let plan = make_study_plan(data.series.len(), cfg.calibration_hours, cfg.n_origins, h)?;
    let grid = QuantileGrid::uniform(cfg.quantile_levels)?;
    let realized: Vec<Vec<f64>> = plan
        .origins
        .iter()
        .map(|&o| actuals(&data.series, o, h))
        .collect::<Result<_>>()?;
    let cumsum_window = cfg.storage.as_ref().map_or(h, |s| s.window);

    let tasks: Vec<(usize, usize)> = (0..cfg.models.len())
        .flat_map(|m| (0..plan.origins.len()).map(move |o| (m, o)))
        .collect();
    let results: Vec<Result<TaskResult>> = tasks
        .par_iter()
        .map(|&(mi, oi)| {
            let entry = &cfg.models[mi];
            let origin = plan.origins[oi];
            let task_err = |source: hydrocast::Error| CliError::Task {
                model: entry.name.clone(),
                origin,
                source,
            };
            let (fitted, ens) = forecast_at(
                entry,
                &data,
                origin,
                cfg.window_hours,
                h,
                cfg.ensemble_size,
                task_seed(seed, &entry.name, origin),
            )
            .map_err(task_err)?;
            let scores = score_ensemble(&ens, &realized[oi], &grid).map_err(|e| task_err(e.into()))?;
            let plot = if oi < cfg.plot_origins {
                Some(plot_data(&ens, cumsum_window)?)
            } else {
                None
            };
            Ok(TaskResult {
                model: mi,
                origin: oi,
                hits: interval_hits(&ens, &realized[oi]),
                scores,
                parameter_count: fitted.parameter_count(),
                plot,
            })
        })
        .collect();

    let mut done = Vec::new();
    let mut failures = Vec::new();
    let mut first_error = None;
    for (r, &(mi, oi)) in results.into_iter().zip(&tasks) {
        match r {
            Ok(t) => done.push(t),
            Err(e) => {
                failures.push(Failure {
                    model: cfg.models[mi].name.clone(),
                    origin: plan.origins[oi],
                    error: e.to_string(),
                });
                first_error.get_or_insert(e);
            }
        }
    }

    let mut out = OutputDir::create(&cfg.output_dir)?;
    let names: Vec<&str> = cfg.models.iter().map(|m| m.name.as_str()).collect();
    out.write("per_origin.csv", &report::per_origin_csv(&names, &data.series, &plan.origins, &done)?)?;
    out.write("plots/fan.csv", &report::fan_csv(&names, &plan.origins, &done)?)?;
    out.write(
        "plots/rank_correlation.csv",
        &report::rank_correlation_csv(&names, &plan.origins, &done)?,
    )?;
    out.write(
        "plots/cumsum_histogram.csv",
        &report::histogram_csv(&names, &plan.origins, &done)?,
    )?;
    if let Some(e) = first_error {
        out.finish(seed, failures)?;
        return Err(e);
    }

    let by_model: Vec<(String, Vec<ForecastScores>)> = names
        .iter()
        .enumerate()
        .map(|(mi, name)| {
            let scores = done.iter().filter(|t| t.model == mi).map(|t| t.scores.clone()).collect();
            (name.to_string(), scores)
        })
        .collect();
    let score_report = ScoreReport::build(&by_model, cfg.reference.as_deref())?;
    let n = plan.origins.len() as f64;
    let models = names
        .iter()
        .enumerate()
        .map(|(mi, name)| {
            let tasks: Vec<&TaskResult> = done.iter().filter(|t| t.model == mi).collect();
            let coverage = (0..INTERVALS.len())
                .map(|k| {
                    (0..h)
                        .map(|hh| tasks.iter().filter(|t| t.hits[hh][k]).count() as f64 / n)
                        .collect()
                })
                .collect();
            ModelAggregate {
                model: name.to_string(),
                mean_parameters: tasks.iter().map(|t| t.parameter_count as f64).sum::<f64>() / n,
                interval_levels: INTERVALS.to_vec(),
                coverage,
            }
        })
        .collect();
    let aggregate = StudyAggregate {
        seed,
        horizon: h,
        ensemble_size: cfg.ensemble_size,
        origins: plan.origins.clone(),
        report: score_report,
        models,
    };
    out.write("per_horizon.csv", &report::per_horizon_csv(&aggregate)?)?;
    out.write("per_quantile.csv", &report::per_quantile_csv(&aggregate, grid.levels())?)?;
    out.write("summary.csv", &report::summary_csv(&aggregate)?)?;
    out.write("dm.csv", &report::dm_csv(&aggregate)?)?;
    let json = serde_json::to_string_pretty(&aggregate).map_err(|e| CliError::Data(e.to_string()))?;
    out.write("aggregate.json", (json + "\n").as_bytes())?;
    let manifest = out.finish(seed, failures)?;
    Ok(StudyOutcome {
        aggregate: Some(aggregate),
        manifest,
    })
}
