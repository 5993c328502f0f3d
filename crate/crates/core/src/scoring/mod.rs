//! Point and probabilistic forecast evaluation.

mod dm;
mod report;

pub use dm::{dm_test, DmResult};
pub use report::{score_ensemble, ForecastScores, ScoreReport, ScoreSummary};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ensemble::{validate_grid, EnsembleError, EnsembleForecast};
use crate::rng;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScoringError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("actuals have zero variance; NS is undefined")]
    ZeroVarianceActuals,
    #[error("loss differential is degenerate")]
    DegenerateDifferential,
    #[error("{needed} observations needed, got {available}")]
    InsufficientData { needed: usize, available: usize },
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
}

fn check_lengths(a: &[f64], b: &[f64]) -> Result<(), ScoringError> {
    if a.is_empty() || a.len() != b.len() {
        return Err(ScoringError::DimensionMismatch(format!(
            "lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

pub fn mae(actuals: &[f64], forecast: &[f64]) -> Result<f64, ScoringError> {
    check_lengths(actuals, forecast)?;
    Ok(actuals.iter().zip(forecast).map(|(y, f)| (y - f).abs()).sum::<f64>() / actuals.len() as f64)
}

pub fn rmse(actuals: &[f64], forecast: &[f64]) -> Result<f64, ScoringError> {
    check_lengths(actuals, forecast)?;
    let mse = actuals.iter().zip(forecast).map(|(y, f)| (y - f).powi(2)).sum::<f64>() / actuals.len() as f64;
    Ok(mse.sqrt())
}

/// Nash-Sutcliffe efficiency `1 - Σ(y - f)² / Σ(y - ȳ)²`.
pub fn ns(actuals: &[f64], forecast: &[f64]) -> Result<f64, ScoringError> {
    check_lengths(actuals, forecast)?;
    let mean = actuals.iter().sum::<f64>() / actuals.len() as f64;
    let den: f64 = actuals.iter().map(|y| (y - mean).powi(2)).sum();
    if den == 0.0 {
        return Err(ScoringError::ZeroVarianceActuals);
    }
    let num: f64 = actuals.iter().zip(forecast).map(|(y, f)| (y - f).powi(2)).sum();
    Ok(1.0 - num / den)
}

/// `(y - q)(τ - 1{y < q})`.
pub fn pinball_loss(actual: f64, quantile: f64, tau: f64) -> f64 {
    let d = actual - quantile;
    d * (tau - if d < 0.0 { 1.0 } else { 0.0 })
}

/// Equidistant quantile levels in `(0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct QuantileGrid {
    levels: Vec<f64>,
}

impl QuantileGrid {
    pub fn new(levels: Vec<f64>) -> Result<Self, ScoringError> {
        validate_grid(&levels)?;
        Ok(Self { levels })
    }

    /// `l / (L + 1)` for `l = 1..=L`.
    pub fn uniform(count: usize) -> Result<Self, ScoringError> {
        Self::new((1..=count).map(|l| l as f64 / (count + 1) as f64).collect())
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

impl Default for QuantileGrid {
    fn default() -> Self {
        Self::uniform(99).expect("valid grid")
    }
}

impl TryFrom<Vec<f64>> for QuantileGrid {
    type Error = ScoringError;

    fn try_from(levels: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(levels)
    }
}

impl From<QuantileGrid> for Vec<f64> {
    fn from(g: QuantileGrid) -> Self {
        g.levels
    }
}

/// Pinball score with its decompositions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PinballScore {
    /// Average over levels and hours.
    pub score: f64,
    /// Average over hours, per level.
    pub per_level: Vec<f64>,
    /// Average over levels, per hour.
    pub per_hour: Vec<f64>,
    /// False if some hour's quantiles decrease in the level.
    pub monotone: bool,
}

/// Pinball score of quantile curves `quantiles[l][h]` at levels `grid`.
pub fn pinball(
    actuals: &[f64],
    quantiles: &[Vec<f64>],
    grid: &[f64],
) -> Result<PinballScore, ScoringError> {
    validate_grid(grid)?;
    if quantiles.len() != grid.len() {
        return Err(ScoringError::DimensionMismatch(format!(
            "{} quantile curves for {} levels",
            quantiles.len(),
            grid.len()
        )));
    }
    for q in quantiles {
        check_lengths(actuals, q)?;
    }
    let h = actuals.len();
    let l = grid.len();
    let mut per_level = vec![0.0; l];
    let mut per_hour = vec![0.0; h];
    for (li, (q, &tau)) in quantiles.iter().zip(grid).enumerate() {
        for (hi, (&y, &qv)) in actuals.iter().zip(q).enumerate() {
            let loss = pinball_loss(y, qv, tau);
            per_level[li] += loss;
            per_hour[hi] += loss;
        }
    }
    let score = per_level.iter().sum::<f64>() / (h * l) as f64;
    per_level.iter_mut().for_each(|v| *v /= h as f64);
    per_hour.iter_mut().for_each(|v| *v /= l as f64);
    let monotone = (0..h).all(|hi| quantiles.windows(2).all(|w| w[0][hi] <= w[1][hi]));
    Ok(PinballScore {
        score,
        per_level,
        per_hour,
        monotone,
    })
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn check_ensemble(ens: &EnsembleForecast, actuals: &[f64]) -> Result<(), ScoringError> {
    if ens.horizon() != actuals.len() {
        return Err(ScoringError::DimensionMismatch(format!(
            "ensemble horizon {} but {} actuals",
            ens.horizon(),
            actuals.len()
        )));
    }
    Ok(())
}

/// Energy score `(1/M)Σ‖X_i - y‖ - (1/(2M²))ΣΣ‖X_i - X'_l‖` where the
/// second ensemble `X'` is `ens` itself.
pub fn energy_score(ens: &EnsembleForecast, actuals: &[f64]) -> Result<f64, ScoringError> {
    energy_score_two(ens, ens, actuals)
}

/// Energy score with an independent second ensemble for the spread term.
pub fn energy_score_two(
    ens: &EnsembleForecast,
    second: &EnsembleForecast,
    actuals: &[f64],
) -> Result<f64, ScoringError> {
    check_ensemble(ens, actuals)?;
    check_ensemble(second, actuals)?;
    if ens.n_paths() != second.n_paths() {
        return Err(ScoringError::DimensionMismatch("ensembles differ in size".into()));
    }
    let m = ens.n_paths() as f64;
    let mut first = 0.0;
    for p in ens.paths() {
        first += distance(p, actuals);
    }
    let mut spread = 0.0;
    for p in ens.paths() {
        for q in second.paths() {
            spread += distance(p, q);
        }
    }
    Ok(first / m - spread / (2.0 * m * m))
}

/// Energy score whose spread term averages `pairs` random path pairs
/// instead of all `M²`. An approximation for very large ensembles.
pub fn energy_score_subsampled(
    ens: &EnsembleForecast,
    actuals: &[f64],
    pairs: usize,
    seed: u64,
) -> Result<f64, ScoringError> {
    check_ensemble(ens, actuals)?;
    if pairs == 0 {
        return Err(ScoringError::InsufficientData { needed: 1, available: 0 });
    }
    let paths = ens.paths();
    let m = paths.len();
    let first = paths.iter().map(|p| distance(p, actuals)).sum::<f64>() / m as f64;
    let mut rng = rng::substream(seed, 0);
    let spread: f64 = (0..pairs)
        .map(|_| distance(&paths[rng.random_range(0..m)], &paths[rng.random_range(0..m)]))
        .sum::<f64>()
        / pairs as f64;
    Ok(first - spread / 2.0)
}

/// Sample CRPS `(1/M)Σ|x_i - y| - (1/(2M²))ΣΣ|x_i - x_l|`.
pub fn crps_sample(samples: &[f64], actual: f64) -> f64 {
    let m = samples.len() as f64;
    let mut first = 0.0;
    for x in samples {
        first += (x - actual).abs();
    }
    let mut spread = 0.0;
    for x in samples {
        for z in samples {
            spread += (x - z).abs();
        }
    }
    first / m - spread / (2.0 * m * m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::DependenceMode;

    fn ens(paths: Vec<Vec<f64>>) -> EnsembleForecast {
        EnsembleForecast::new(paths, 0, 0, DependenceMode::Standard).unwrap()
    }

    #[test]
    fn point_measures() {
        assert_eq!(mae(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(rmse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(ns(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 1.0);
        assert_eq!(ns(&[1.0, 3.0, 5.0], &[3.0, 3.0, 3.0]).unwrap(), 0.0);
        assert_eq!(mae(&[0.0, 2.0], &[1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(rmse(&[0.0, 2.0], &[1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(ns(&[0.0, 2.0], &[1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(ns(&[2.0, 2.0], &[1.0, 1.0]).unwrap_err(), ScoringError::ZeroVarianceActuals);
        assert!(mae(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn pinball_cases() {
        let pb = pinball(&[5.0], &[vec![3.0]], &[0.9]).unwrap();
        assert!((pb.score - 1.8).abs() < 1e-15);
        let pb = pinball(&[1.0, 2.0], &[vec![1.0, 2.0]], &[0.3]).unwrap();
        assert_eq!(pb.score, 0.0);
        // median level only: half the MAE
        let y = [1.0, 4.0, -2.0];
        let q = [0.0, 5.0, 1.0];
        let pb = pinball(&y, &[q.to_vec()], &[0.5]).unwrap();
        assert!((pb.score - 0.5 * mae(&y, &q).unwrap()).abs() < 1e-15);
        let pb = pinball(&[0.0], &[vec![2.0], vec![1.0]], &[0.2, 0.8]).unwrap();
        assert!(!pb.monotone);
    }

    #[test]
    fn grid_defaults() {
        let g = QuantileGrid::default();
        assert_eq!(g.len(), 99);
        assert!((g.levels()[0] - 0.01).abs() < 1e-15);
        assert!((g.levels()[98] - 0.99).abs() < 1e-15);
        assert!(QuantileGrid::new(vec![0.5, 0.5]).is_err());
        let json = serde_json::to_string(&QuantileGrid::uniform(3).unwrap()).unwrap();
        assert_eq!(json, "[0.25,0.5,0.75]");
        assert!(serde_json::from_str::<QuantileGrid>("[0.0]").is_err());
    }

    #[test]
    fn energy_score_identities() {
        let y = [1.0, 2.0, 3.0];
        assert_eq!(energy_score(&ens(vec![y.to_vec(); 4]), &y).unwrap(), 0.0);
        let p = vec![2.0, 0.0, 5.0];
        assert_eq!(energy_score(&ens(vec![p.clone()]), &y).unwrap(), distance(&p, &y));
        assert_eq!(energy_score(&ens(vec![vec![0.0], vec![2.0]]), &[1.0]).unwrap(), 0.5);
        let samples = [0.3, -1.2, 2.5, 0.9];
        let e = ens(samples.iter().map(|&s| vec![s]).collect());
        assert_eq!(energy_score(&e, &[0.4]).unwrap(), crps_sample(&samples, 0.4));
        assert!(energy_score(&e, &[0.4, 1.0]).is_err());
    }

    #[test]
    fn subsampled_energy_score_is_close() {
        let paths: Vec<Vec<f64>> = (0..200).map(|i| vec![(i % 17) as f64, (i % 5) as f64]).collect();
        let e = ens(paths);
        let exact = energy_score(&e, &[8.0, 2.0]).unwrap();
        let approx = energy_score_subsampled(&e, &[8.0, 2.0], 200_000, 3).unwrap();
        assert!((exact - approx).abs() < 0.02 * exact.abs().max(1.0));
    }
}
