use serde::{Deserialize, Serialize};

use super::{dm_test, energy_score, mae, ns, pinball, rmse, DmResult, QuantileGrid, ScoringError};
use crate::ensemble::{empirical_quantiles, EnsembleForecast};

/// All scores of one ensemble forecast against its realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastScores {
    pub origin: usize,
    pub es: f64,
    pub pb: f64,
    /// MAE of the per-hour median.
    pub mae: f64,
    /// RMSE of the per-hour mean.
    pub rmse: f64,
    /// `None` when the realized values are constant.
    pub ns: Option<f64>,
    pub pb_per_level: Vec<f64>,
    pub pb_per_hour: Vec<f64>,
    pub abs_error: Vec<f64>,
    pub sq_error: Vec<f64>,
    pub actuals: Vec<f64>,
    pub monotone_quantiles: bool,
}

pub fn score_ensemble(
    ens: &EnsembleForecast,
    actuals: &[f64],
    grid: &QuantileGrid,
) -> Result<ForecastScores, ScoringError> {
    let es = energy_score(ens, actuals)?;
    let median = ens.median();
    let mean = ens.mean();
    let quantiles = empirical_quantiles(ens, grid.levels())?;
    let pb = pinball(actuals, &quantiles, grid.levels())?;
    let ns = match ns(actuals, &mean) {
        Ok(v) => Some(v),
        Err(ScoringError::ZeroVarianceActuals) => None,
        Err(e) => return Err(e),
    };
    Ok(ForecastScores {
        origin: ens.origin,
        es,
        pb: pb.score,
        mae: mae(actuals, &median)?,
        rmse: rmse(actuals, &mean)?,
        ns,
        pb_per_level: pb.per_level,
        pb_per_hour: pb.per_hour,
        abs_error: actuals.iter().zip(&median).map(|(y, f)| (y - f).abs()).collect(),
        sq_error: actuals.iter().zip(&mean).map(|(y, f)| (y - f).powi(2)).collect(),
        actuals: actuals.to_vec(),
        monotone_quantiles: pb.monotone,
    })
}

/// Error curves over the forecast horizon, aggregated over origins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorizonCurves {
    pub mae: Vec<f64>,
    pub rmse: Vec<f64>,
    pub ns: Vec<Option<f64>>,
    pub pb: Vec<f64>,
}

/// Relative improvement over the reference model in percent (positive
/// means better than the reference).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Improvement {
    pub es: f64,
    pub pb: f64,
    pub mae: f64,
    pub rmse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreSummary {
    pub model: String,
    pub n_origins: usize,
    pub es: f64,
    pub pb: f64,
    pub mae: f64,
    pub rmse: f64,
    /// Mean over origins where NS is defined.
    pub ns: Option<f64>,
    pub per_horizon: HorizonCurves,
    pub per_quantile: Vec<f64>,
    pub improvement: Option<Improvement>,
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    s / n as f64
}

impl ScoreSummary {
    pub fn from_scores(model: &str, scores: &[ForecastScores]) -> Result<Self, ScoringError> {
        let first = scores.first().ok_or(ScoringError::InsufficientData {
            needed: 1,
            available: 0,
        })?;
        let horizon = first.actuals.len();
        let levels = first.pb_per_level.len();
        if scores
            .iter()
            .any(|s| s.actuals.len() != horizon || s.pb_per_level.len() != levels)
        {
            return Err(ScoringError::DimensionMismatch(
                "origins differ in horizon or quantile grid".into(),
            ));
        }
        let ns_values: Vec<f64> = scores.iter().filter_map(|s| s.ns).collect();
        let per_horizon = HorizonCurves {
            mae: (0..horizon).map(|h| mean(scores.iter().map(|s| s.abs_error[h]))).collect(),
            rmse: (0..horizon)
                .map(|h| mean(scores.iter().map(|s| s.sq_error[h])).sqrt())
                .collect(),
            ns: (0..horizon)
                .map(|h| {
                    let ybar = mean(scores.iter().map(|s| s.actuals[h]));
                    let den: f64 = scores.iter().map(|s| (s.actuals[h] - ybar).powi(2)).sum();
                    let num: f64 = scores.iter().map(|s| s.sq_error[h]).sum();
                    (den > 0.0).then(|| 1.0 - num / den)
                })
                .collect(),
            pb: (0..horizon).map(|h| mean(scores.iter().map(|s| s.pb_per_hour[h]))).collect(),
        };
        Ok(Self {
            model: model.to_string(),
            n_origins: scores.len(),
            es: mean(scores.iter().map(|s| s.es)),
            pb: mean(scores.iter().map(|s| s.pb)),
            mae: mean(scores.iter().map(|s| s.mae)),
            rmse: mean(scores.iter().map(|s| s.rmse)),
            ns: (!ns_values.is_empty()).then(|| mean(ns_values.iter().copied())),
            per_horizon,
            per_quantile: (0..levels).map(|l| mean(scores.iter().map(|s| s.pb_per_level[l]))).collect(),
            improvement: None,
        })
    }
}

/// Diebold-Mariano comparison of two models on one loss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DmEntry {
    pub metric: String,
    pub model_a: String,
    pub model_b: String,
    pub result: Option<DmResult>,
    /// Why the test could not be computed.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub reference: Option<String>,
    pub summaries: Vec<ScoreSummary>,
    pub dm: Vec<DmEntry>,
}

impl ScoreReport {
    /// Aggregates per-origin scores of every model. All models must be
    /// scored on the same origins in the same order.
    pub fn build(
        models: &[(String, Vec<ForecastScores>)],
        reference: Option<&str>,
    ) -> Result<Self, ScoringError> {
        let mut summaries = models
            .iter()
            .map(|(name, s)| ScoreSummary::from_scores(name, s))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(r) = reference {
            let base = summaries
                .iter()
                .find(|s| s.model == r)
                .cloned()
                .ok_or_else(|| ScoringError::DimensionMismatch(format!("reference model `{r}` not scored")))?;
            let pct = |v: f64, b: f64| 100.0 * (b - v) / b;
            for s in &mut summaries {
                s.improvement = Some(Improvement {
                    es: pct(s.es, base.es),
                    pb: pct(s.pb, base.pb),
                    mae: pct(s.mae, base.mae),
                    rmse: pct(s.rmse, base.rmse),
                });
            }
        }
        let mut dm = Vec::new();
        for (i, (name_a, a)) in models.iter().enumerate() {
            for (name_b, b) in &models[i + 1..] {
                if a.iter().zip(b).any(|(x, y)| x.origin != y.origin) || a.len() != b.len() {
                    return Err(ScoringError::DimensionMismatch(format!(
                        "models `{name_a}` and `{name_b}` were scored on different origins"
                    )));
                }
                for (metric, pick) in [
                    ("es", (|s: &ForecastScores| s.es) as fn(&ForecastScores) -> f64),
                    ("pb", |s: &ForecastScores| s.pb),
                ] {
                    let la: Vec<f64> = a.iter().map(pick).collect();
                    let lb: Vec<f64> = b.iter().map(pick).collect();
                    let (result, error) = match dm_test(&la, &lb) {
                        Ok(r) => (Some(r), None),
                        Err(e) => (None, Some(e.to_string())),
                    };
                    dm.push(DmEntry {
                        metric: metric.into(),
                        model_a: name_a.clone(),
                        model_b: name_b.clone(),
                        result,
                        error,
                    });
                }
            }
        }
        Ok(Self {
            reference: reference.map(str::to_string),
            summaries,
            dm,
        })
    }
}
