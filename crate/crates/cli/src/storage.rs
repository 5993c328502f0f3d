//! Probability that cumulative demand over the first hours of a forecast
//! exceeds a storage capacity, per dependence mode.

use hydrocast::ensemble::{exceedance_probability, rearrange, DependenceMode};
use hydrocast::series::make_study_plan;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{StorageConfig, StudyConfig};
use crate::error::{CliError, Result};
use crate::study::{actuals, forecast_at, load_data, task_seed};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeProbability {
    pub mode: DependenceMode,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExceedanceTable {
    pub model: String,
    pub capacity: f64,
    pub window: usize,
    pub n_origins: usize,
    /// Simulated probabilities averaged over origins.
    pub modes: Vec<ModeProbability>,
    /// Share of origins whose realized cumulative demand exceeded the
    /// capacity.
    pub empirical: f64,
}

impl ExceedanceTable {
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| CliError::Data(e.to_string());
        w.write_record(["mode", "probability"]).map_err(err)?;
        for m in &self.modes {
            w.write_record([m.mode.to_string(), m.probability.to_string()]).map_err(err)?;
        }
        w.write_record(["empirical".to_string(), self.empirical.to_string()])
            .map_err(err)?;
        w.into_inner().map_err(|e| CliError::Data(e.to_string()))
    }
}

/// Forecasts the storage model at every study origin with the study's
/// seeds, so the ensembles are the ones the study scored.
pub fn run_storage_analysis(cfg: &StudyConfig, storage: &StorageConfig) -> Result<ExceedanceTable> {
    cfg.validate()?;
    if storage.window == 0 || storage.window > cfg.horizon {
        return Err(CliError::Config(format!(
            "storage window {} must lie in 1..={}",
            storage.window, cfg.horizon
        )));
    }
    let seed = cfg.require_seed()?;
    let entry = match &storage.model {
        Some(name) => cfg.model(name)?,
        None => &cfg.models[0],
    };
    let data = load_data(&cfg.data, 0)?;
    let plan = make_study_plan(data.series.len(), cfg.calibration_hours, cfg.n_origins, cfg.horizon)?;
    let per_origin: Vec<Result<(Vec<f64>, bool)>> = plan
        .origins
        .par_iter()
        .map(|&origin| {
            let realized: f64 = actuals(&data.series, origin, storage.window)?.iter().sum();
            let (_, ens) = forecast_at(
                entry,
                &data,
                origin,
                cfg.window_hours,
                cfg.horizon,
                cfg.ensemble_size,
                task_seed(seed, &entry.name, origin),
            )
            .map_err(|source| CliError::Task {
                model: entry.name.clone(),
                origin,
                source,
            })?;
            let probs = DependenceMode::ALL
                .iter()
                .map(|&mode| exceedance_probability(&rearrange(&ens, mode), storage.capacity, storage.window))
                .collect::<Result<Vec<f64>, _>>()?;
            Ok((probs, realized > storage.capacity))
        })
        .collect();
    let per_origin = per_origin.into_iter().collect::<Result<Vec<_>>>()?;
    let n = per_origin.len() as f64;
    let modes = DependenceMode::ALL
        .iter()
        .enumerate()
        .map(|(k, &mode)| ModeProbability {
            mode,
            probability: per_origin.iter().map(|(p, _)| p[k]).sum::<f64>() / n,
        })
        .collect();
    Ok(ExceedanceTable {
        model: entry.name.clone(),
        capacity: storage.capacity,
        window: storage.window,
        n_origins: per_origin.len(),
        modes,
        empirical: per_origin.iter().filter(|(_, hit)| *hit).count() as f64 / n,
    })
}
