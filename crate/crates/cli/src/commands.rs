//! Single-step subcommands: data simulation and ingestion, fitting,
//! forecasting and scoring of stored ensembles.

use std::collections::BTreeMap;
use std::path::Path;

use hydrocast::ensemble::{rearrange, DependenceMode, EnsembleForecast};
use hydrocast::forecaster::{Forecaster, ForecasterSpec};
use hydrocast::model::DemandModel;
use hydrocast::scoring::{score_ensemble, QuantileGrid};
use hydrocast::series::{export_csv, ingest_csv, simulate_synthetic, CsvSchema, SyntheticConfig};
use serde::{Deserialize, Serialize};

use crate::config::StudyConfig;
use crate::error::{CliError, Result};
use crate::manifest::OutputDir;
use crate::report;
use crate::study::{fit_window, forecast_at, load_data, FAN_LEVELS};

pub fn load_synthetic_config(path: Option<&Path>) -> Result<SyntheticConfig> {
    match path {
        None => Ok(SyntheticConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))
        }
    }
}

/// Simulates a synthetic demand series and writes it as demand CSV.
pub fn simulate_data(cfg: &SyntheticConfig, seed: u64, out: &Path) -> Result<usize> {
    let series = simulate_synthetic(cfg, seed).map_err(|e| match e.kind() {
        hydrocast::ErrorKind::Config => CliError::Config(e.to_string()),
        _ => e.into(),
    })?;
    let mut buf = Vec::new();
    export_csv(&series, &mut buf)?;
    write_file(out, &buf)?;
    Ok(series.len())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub start: String,
    pub end: String,
    pub hours: usize,
    pub missing: usize,
}

/// Reads a demand CSV onto the hourly grid; optionally writes the
/// normalized series.
pub fn ingest(path: &Path, schema: &CsvSchema, out: Option<&Path>) -> Result<IngestSummary> {
    let series = ingest_csv(path, schema)?;
    if let Some(out) = out {
        let mut buf = Vec::new();
        export_csv(&series, &mut buf)?;
        write_file(out, &buf)?;
    }
    let fmt = "%Y-%m-%dT%H:%M:%S";
    Ok(IngestSummary {
        start: series.start().format(fmt).to_string(),
        end: series.timestamp(series.len() - 1).format(fmt).to_string(),
        hours: series.len(),
        missing: series.missing_count(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub model: String,
    pub window_start: usize,
    pub window_end: usize,
    pub parameter_count: usize,
}

/// Fits `model` on the window ending before `end` (default: the first
/// study origin). ARX models additionally get their coefficient reports
/// and a JSON dump.
pub fn fit(cfg: &StudyConfig, model: &str, end: Option<usize>, out: &Path) -> Result<FitSummary> {
    cfg.validate()?;
    let entry = cfg.model(model)?;
    let data = load_data(&cfg.data, 0)?;
    let end = end.unwrap_or(cfg.calibration_hours);
    if end > data.series.len() {
        return Err(CliError::Config(format!(
            "fit end {end} lies beyond the {} observed hours",
            data.series.len()
        )));
    }
    let window = fit_window(end, cfg.window_hours);
    let mut dir = OutputDir::create(out)?;
    let parameter_count = match entry.spec.forecaster() {
        ForecasterSpec::Arx { config, .. } => {
            let m = DemandModel::fit(&data.series, &data.ctx, window.clone(), &config)?;
            let mut buf = Vec::new();
            m.mean.linear.write_report(&mut buf)?;
            dir.write("mean_coefficients.csv", &buf)?;
            buf.clear();
            m.variance.linear.write_report(&mut buf)?;
            dir.write("variance_coefficients.csv", &buf)?;
            dir.write("model.json", m.to_json()?.as_bytes())?;
            m.parameter_count()
        }
        spec => spec.fit(&data.series, &data.ctx, window.clone())?.parameter_count(),
    };
    let summary = FitSummary {
        model: model.to_string(),
        window_start: window.start,
        window_end: window.end,
        parameter_count,
    };
    let json = serde_json::to_string_pretty(&summary).map_err(|e| CliError::Data(e.to_string()))?;
    dir.write("fit.json", (json + "\n").as_bytes())?;
    Ok(summary)
}

/// Forecasts `model` at `origin` and writes the ensemble paths in long
/// format plus fan-chart quantiles.
pub fn forecast(
    cfg: &StudyConfig,
    model: &str,
    origin: Option<usize>,
    seed: u64,
    mode: DependenceMode,
    out: &Path,
) -> Result<EnsembleForecast> {
    cfg.validate()?;
    let entry = cfg.model(model)?;
    let data = load_data(&cfg.data, cfg.horizon)?;
    let origin = origin.unwrap_or(cfg.calibration_hours);
    if origin > data.series.len() {
        return Err(CliError::Config(format!(
            "origin {origin} lies beyond the {} observed hours",
            data.series.len()
        )));
    }
    let (_, ens) = forecast_at(entry, &data, origin, cfg.window_hours, cfg.horizon, cfg.ensemble_size, seed)?;
    let ens = rearrange(&ens, mode);
    let mut dir = OutputDir::create(out)?;
    let mut buf = Vec::new();
    ens.write_long_csv(&mut buf, true)?;
    dir.write("ensemble.csv", &buf)?;
    let fan = hydrocast::ensemble::empirical_quantiles(&ens, &FAN_LEVELS)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(report::fan_header()).map_err(|e| CliError::Data(e.to_string()))?;
    report::fan_rows(&mut w, model, origin, &ens.mean(), &fan)?;
    dir.write("quantiles.csv", &w.into_inner().map_err(|e| CliError::Data(e.to_string()))?)?;
    Ok(ens)
}

#[derive(Debug, Deserialize)]
struct EnsembleRow {
    origin: usize,
    path: usize,
    h: usize,
    value: f64,
}

#[derive(Debug, Deserialize)]
struct ActualRow {
    origin: usize,
    h: usize,
    value: f64,
}

/// Reads long-format ensembles (`origin,path,h,value`, 1-based path and
/// hour) grouped by origin.
pub fn read_ensembles(path: &Path) -> Result<Vec<EnsembleForecast>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| CliError::io(path, e))?;
    let mut grouped: BTreeMap<usize, BTreeMap<(usize, usize), f64>> = BTreeMap::new();
    for rec in rdr.deserialize() {
        let r: EnsembleRow = rec.map_err(|e| CliError::io(path, e))?;
        if r.path == 0 || r.h == 0 {
            return Err(CliError::Data(format!("{}: path and h are 1-based", path.display())));
        }
        grouped.entry(r.origin).or_default().insert((r.path, r.h), r.value);
    }
    grouped
        .into_iter()
        .map(|(origin, cells)| {
            let m = cells.keys().map(|k| k.0).max().unwrap_or(0);
            let h = cells.keys().map(|k| k.1).max().unwrap_or(0);
            if cells.len() != m * h {
                return Err(CliError::Data(format!("ensemble at origin {origin} is not a full {m}×{h} grid")));
            }
            let paths = (1..=m)
                .map(|p| (1..=h).map(|hh| cells[&(p, hh)]).collect())
                .collect();
            Ok(EnsembleForecast::new(paths, origin, 0, DependenceMode::Standard)?)
        })
        .collect()
}

pub fn read_actuals(path: &Path) -> Result<BTreeMap<usize, Vec<f64>>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| CliError::io(path, e))?;
    let mut grouped: BTreeMap<usize, BTreeMap<usize, f64>> = BTreeMap::new();
    for rec in rdr.deserialize() {
        let r: ActualRow = rec.map_err(|e| CliError::io(path, e))?;
        grouped.entry(r.origin).or_default().insert(r.h, r.value);
    }
    grouped
        .into_iter()
        .map(|(origin, hours)| {
            if hours.keys().copied().ne(1..=hours.len()) {
                return Err(CliError::Data(format!("actuals at origin {origin} must cover h = 1..H")));
            }
            Ok((origin, hours.into_values().collect()))
        })
        .collect()
}

/// Scores stored ensembles against realized values; returns CSV rows
/// `origin,es,pb,mae,rmse,ns`.
pub fn score(ensembles: &Path, actuals: &Path, levels: usize) -> Result<Vec<u8>> {
    let grid = QuantileGrid::uniform(levels).map_err(|e| CliError::Config(e.to_string()))?;
    let realized = read_actuals(actuals)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Data(e.to_string());
    w.write_record(["origin", "es", "pb", "mae", "rmse", "ns"]).map_err(err)?;
    for ens in read_ensembles(ensembles)? {
        let y = realized
            .get(&ens.origin)
            .ok_or_else(|| CliError::Data(format!("no actuals for origin {}", ens.origin)))?;
        let s = score_ensemble(&ens, y, &grid)?;
        w.write_record([
            s.origin.to_string(),
            s.es.to_string(),
            s.pb.to_string(),
            s.mae.to_string(),
            s.rmse.to_string(),
            s.ns.map(|v| v.to_string()).unwrap_or_default(),
        ])
        .map_err(err)?;
    }
    w.into_inner().map_err(|e| CliError::Data(e.to_string()))
}
