use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{DependenceMode, EnsembleError, EnsembleForecast};
use crate::model::{DemandModel, ModelError, Step};
use crate::rng;
use crate::series::{CalendarContext, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulationOptions {
    /// Clamp simulated demand at zero. Off by default so that scores refer
    /// to the raw model.
    pub floor_at_zero: bool,
}

/// Simulates `m` paths of `h` hours starting at calendar index `origin`.
/// Observations at indices `>= origin` are never read.
pub fn simulate(
    model: &DemandModel,
    ctx: &CalendarContext,
    history: &TimeSeries,
    origin: usize,
    h: usize,
    m: usize,
    seed: u64,
) -> Result<EnsembleForecast, EnsembleError> {
    simulate_with(model, ctx, history, origin, h, m, seed, SimulationOptions::default())
}

/// Values of `lookup(s)` for `s` in `origin - depth .. origin`, checking
/// only the entries some step actually reads.
fn gather_history(
    steps: &[Step],
    origin: usize,
    depth: usize,
    lookup: impl Fn(usize) -> Option<f64>,
) -> Result<Vec<f64>, ModelError> {
    let mut out = vec![f64::NAN; depth];
    for (h, step) in steps.iter().enumerate() {
        for &(k, _) in &step.lags {
            if k > h {
                let t = origin + h;
                if k > t {
                    return Err(ModelError::MissingLag { index: t, lag: k });
                }
                let s = t - k;
                out[s + depth - origin] = lookup(s).ok_or(ModelError::MissingLag { index: t, lag: k })?;
            }
        }
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
pub fn simulate_with(
    model: &DemandModel,
    ctx: &CalendarContext,
    history: &TimeSeries,
    origin: usize,
    h: usize,
    m: usize,
    seed: u64,
    options: SimulationOptions,
) -> Result<EnsembleForecast, EnsembleError> {
    if h == 0 || m == 0 {
        return Err(EnsembleError::InvalidShape("H and M must be positive".into()));
    }
    if origin + h > ctx.len() {
        return Err(EnsembleError::HorizonBeyondCalendar {
            needed: origin + h,
            available: ctx.len(),
        });
    }
    let pool = &model.variance.innovations;
    if pool.is_empty() {
        return Err(EnsembleError::EmptyInnovationPool);
    }
    let mean_pred = model.mean.linear.predictor()?;
    let var_pred = model.variance.linear.predictor()?;
    let mean_steps: Vec<Step> = (0..h).map(|i| mean_pred.step(ctx, origin + i)).collect();
    let var_steps: Vec<Step> = (0..h).map(|i| var_pred.step(ctx, origin + i)).collect();

    let mean_depth = mean_pred.max_lag().min(origin);
    let y_hist = gather_history(&mean_steps, origin, mean_depth, |s| history.get(s))?;

    let var_depth = var_pred.max_lag();
    let target = model.variance.target;
    let e_hist: Vec<f64> = if var_depth == 0 {
        Vec::new()
    } else {
        if var_depth > origin {
            return Err(ModelError::MissingLag {
                index: origin,
                lag: var_depth,
            }
            .into());
        }
        model
            .one_step_residuals(&mean_pred, ctx, history, origin - var_depth..origin)?
            .into_iter()
            .map(|e| target.transform(e))
            .collect()
    };
    let floor = model.variance.sigma_floor;

    let paths: Vec<Vec<f64>> = (0..m)
        .into_par_iter()
        .map(|path| {
            let mut rng = rng::substream(seed, path as u64);
            let mut y = vec![0.0; h];
            let mut e = vec![0.0; h];
            for i in 0..h {
                let mu = mean_steps[i].apply(|k| {
                    if k <= i {
                        y[i - k]
                    } else {
                        y_hist[i + mean_depth - k]
                    }
                });
                let fitted = var_steps[i].apply(|k| {
                    if k <= i {
                        target.transform(e[i - k])
                    } else {
                        e_hist[i + var_depth - k]
                    }
                });
                let sigma = target.to_variance(fitted, floor).sqrt();
                e[i] = sigma * pool[rng.random_range(0..pool.len())];
                y[i] = mu + e[i];
                if options.floor_at_zero {
                    y[i] = y[i].max(0.0);
                }
            }
            y
        })
        .collect();
    EnsembleForecast::new(paths, origin, seed, DependenceMode::Standard)
}
