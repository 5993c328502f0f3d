//! Multi-step ensemble forecasts: Monte-Carlo path simulation, dependence
//! rearrangements, empirical quantiles and exceedance probabilities.

mod rearrange;
mod simulate;

pub use rearrange::{rank_correlation, rearrange};
pub use simulate::{simulate, simulate_with, SimulationOptions};

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::ModelError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnsembleError {
    #[error("invalid ensemble shape: {0}")]
    InvalidShape(String),
    #[error("window of {window} hours exceeds the horizon of {horizon}")]
    WindowExceedsHorizon { window: usize, horizon: usize },
    #[error("quantile grid is empty")]
    EmptyGrid,
    #[error("invalid quantile grid: {0}")]
    InvalidGrid(String),
    #[error("unknown dependence mode `{0}`")]
    UnknownMode(String),
    #[error("innovation pool is empty")]
    EmptyInnovationPool,
    #[error("calendar covers {available} hours but the forecast needs {needed}")]
    HorizonBeyondCalendar { needed: usize, available: usize },
    #[error("ensemble export: {0}")]
    Io(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// How the per-hour marginals of an ensemble are joined into paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DependenceMode {
    /// As simulated.
    Standard,
    /// Equal ranks linked across hours.
    Comonotone,
    /// Ranks reversed between consecutive hours.
    Countermonotone,
    /// Independent random permutation per hour.
    Independent,
}

impl DependenceMode {
    pub const ALL: [DependenceMode; 4] = [
        DependenceMode::Standard,
        DependenceMode::Comonotone,
        DependenceMode::Countermonotone,
        DependenceMode::Independent,
    ];
}

impl fmt::Display for DependenceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DependenceMode::Standard => "standard",
            DependenceMode::Comonotone => "comonotone",
            DependenceMode::Countermonotone => "countermonotone",
            DependenceMode::Independent => "independent",
        })
    }
}

impl FromStr for DependenceMode {
    type Err = EnsembleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DependenceMode::ALL
            .into_iter()
            .find(|m| m.to_string() == s)
            .ok_or_else(|| EnsembleError::UnknownMode(s.to_string()))
    }
}

/// `M` simulated paths of length `H` issued at calendar index `origin`
/// (the first forecast hour).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleForecast {
    paths: Vec<Vec<f64>>,
    pub origin: usize,
    pub seed: u64,
    pub mode: DependenceMode,
}

impl EnsembleForecast {
    pub fn new(
        paths: Vec<Vec<f64>>,
        origin: usize,
        seed: u64,
        mode: DependenceMode,
    ) -> Result<Self, EnsembleError> {
        let h = paths.first().map_or(0, Vec::len);
        if paths.is_empty() || h == 0 {
            return Err(EnsembleError::InvalidShape("need at least one path and one hour".into()));
        }
        if paths.iter().any(|p| p.len() != h) {
            return Err(EnsembleError::InvalidShape("paths differ in length".into()));
        }
        if paths.iter().flatten().any(|v| !v.is_finite()) {
            return Err(EnsembleError::InvalidShape("non-finite path value".into()));
        }
        Ok(Self {
            paths,
            origin,
            seed,
            mode,
        })
    }

    pub fn n_paths(&self) -> usize {
        self.paths.len()
    }

    pub fn horizon(&self) -> usize {
        self.paths[0].len()
    }

    pub fn paths(&self) -> &[Vec<f64>] {
        &self.paths
    }

    /// The `M` values of hour `h` (0-based).
    pub fn hour(&self, h: usize) -> Vec<f64> {
        self.paths.iter().map(|p| p[h]).collect()
    }

    /// Per-hour ensemble mean.
    pub fn mean(&self) -> Vec<f64> {
        let m = self.n_paths() as f64;
        (0..self.horizon())
            .map(|h| self.paths.iter().map(|p| p[h]).sum::<f64>() / m)
            .collect()
    }

    /// Per-hour ensemble median (quantile 0.5 under the inverse-CDF rule).
    pub fn median(&self) -> Vec<f64> {
        (0..self.horizon())
            .map(|h| {
                let mut v = self.hour(h);
                v.sort_by(f64::total_cmp);
                quantile_of_sorted(&v, 0.5)
            })
            .collect()
    }

    /// Cumulative demand of every path over the first `window` hours.
    pub fn cumulative_sums(&self, window: usize) -> Result<Vec<f64>, EnsembleError> {
        if window == 0 || window > self.horizon() {
            return Err(EnsembleError::WindowExceedsHorizon {
                window,
                horizon: self.horizon(),
            });
        }
        Ok(self.paths.iter().map(|p| p[..window].iter().sum()).collect())
    }

    /// Long-format CSV rows `origin,path,h,value` with 1-based `path` and `h`.
    pub fn write_long_csv<W: Write>(&self, out: W, header: bool) -> Result<(), EnsembleError> {
        let err = |e: csv::Error| EnsembleError::Io(e.to_string());
        let mut w = csv::Writer::from_writer(out);
        if header {
            w.write_record(["origin", "path", "h", "value"]).map_err(err)?;
        }
        for (i, p) in self.paths.iter().enumerate() {
            for (h, v) in p.iter().enumerate() {
                w.write_record([
                    self.origin.to_string(),
                    (i + 1).to_string(),
                    (h + 1).to_string(),
                    v.to_string(),
                ])
                .map_err(err)?;
            }
        }
        w.flush().map_err(|e| EnsembleError::Io(e.to_string()))
    }

    pub fn summary(&self, grid: &[f64]) -> Result<EnsembleSummary, EnsembleError> {
        Ok(EnsembleSummary {
            origin: self.origin,
            seed: self.seed,
            mode: self.mode,
            n_paths: self.n_paths(),
            mean: self.mean(),
            levels: grid.to_vec(),
            quantiles: empirical_quantiles(self, grid)?,
        })
    }
}

/// Compact per-hour description of an ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub origin: usize,
    pub seed: u64,
    pub mode: DependenceMode,
    pub n_paths: usize,
    pub mean: Vec<f64>,
    pub levels: Vec<f64>,
    /// `quantiles[l][h]` is the level-`l` quantile of hour `h`.
    pub quantiles: Vec<Vec<f64>>,
}

/// `x_(⌈τM⌉)` of an ascending sample, with the rank clamped to `1..=M`.
pub fn quantile_of_sorted(sorted: &[f64], tau: f64) -> f64 {
    let m = sorted.len();
    let x = tau * m as f64;
    // guards against products such as 0.07 * 100 = 7.000000000000001
    let rank = (x - 1e-9 * x.max(1.0)).ceil() as usize;
    sorted[rank.clamp(1, m) - 1]
}

pub fn validate_grid(grid: &[f64]) -> Result<(), EnsembleError> {
    if grid.is_empty() {
        return Err(EnsembleError::EmptyGrid);
    }
    if let Some(t) = grid.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
        return Err(EnsembleError::InvalidGrid(format!("level {t} outside (0, 1)")));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(EnsembleError::InvalidGrid("levels must be strictly increasing".into()));
    }
    Ok(())
}

/// Per-hour empirical quantiles; `result[l][h]` belongs to `grid[l]`.
pub fn empirical_quantiles(
    ens: &EnsembleForecast,
    grid: &[f64],
) -> Result<Vec<Vec<f64>>, EnsembleError> {
    validate_grid(grid)?;
    let mut out = vec![vec![0.0; ens.horizon()]; grid.len()];
    for h in 0..ens.horizon() {
        let mut v = ens.hour(h);
        v.sort_by(f64::total_cmp);
        for (l, &tau) in grid.iter().enumerate() {
            out[l][h] = quantile_of_sorted(&v, tau);
        }
    }
    Ok(out)
}

/// Fraction of paths whose demand summed over the first `window` hours
/// exceeds `capacity`.
pub fn exceedance_probability(
    ens: &EnsembleForecast,
    capacity: f64,
    window: usize,
) -> Result<f64, EnsembleError> {
    let sums = ens.cumulative_sums(window)?;
    Ok(sums.iter().filter(|&&s| s > capacity).count() as f64 / sums.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ens(paths: Vec<Vec<f64>>) -> EnsembleForecast {
        EnsembleForecast::new(paths, 0, 0, DependenceMode::Standard).unwrap()
    }

    #[test]
    fn shape_validation() {
        assert!(EnsembleForecast::new(vec![], 0, 0, DependenceMode::Standard).is_err());
        assert!(EnsembleForecast::new(vec![vec![1.0], vec![1.0, 2.0]], 0, 0, DependenceMode::Standard).is_err());
        assert!(EnsembleForecast::new(vec![vec![f64::NAN]], 0, 0, DependenceMode::Standard).is_err());
    }

    #[test]
    fn quantile_rule() {
        let e = ens(vec![vec![3.0], vec![1.0], vec![4.0], vec![2.0]]);
        let q = empirical_quantiles(&e, &[0.25, 0.5, 0.51, 0.99]).unwrap();
        assert_eq!(q, vec![vec![1.0], vec![2.0], vec![3.0], vec![4.0]]);
        let single = ens(vec![vec![7.0, 8.0]]);
        let q = empirical_quantiles(&single, &[0.01, 0.5, 0.99]).unwrap();
        assert!(q.iter().all(|row| row == &vec![7.0, 8.0]));
        let hundred: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(quantile_of_sorted(&hundred, 0.07), 7.0);
    }

    #[test]
    fn grid_errors() {
        let e = ens(vec![vec![1.0]]);
        assert_eq!(empirical_quantiles(&e, &[]).unwrap_err(), EnsembleError::EmptyGrid);
        assert!(empirical_quantiles(&e, &[0.5, 0.4]).is_err());
        assert!(empirical_quantiles(&e, &[1.0]).is_err());
    }

    #[test]
    fn exceedance_cases() {
        let e = ens(vec![vec![4.0, 6.0], vec![10.0, 20.0]]);
        assert_eq!(exceedance_probability(&e, 20.0, 2).unwrap(), 0.5);
        assert_eq!(exceedance_probability(&e, 0.0, 2).unwrap(), 1.0);
        assert_eq!(exceedance_probability(&e, f64::INFINITY, 1).unwrap(), 0.0);
        assert!(matches!(
            exceedance_probability(&e, 1.0, 3),
            Err(EnsembleError::WindowExceedsHorizon { .. })
        ));
    }

    #[test]
    fn modes_parse() {
        for m in DependenceMode::ALL {
            assert_eq!(m.to_string().parse::<DependenceMode>().unwrap(), m);
        }
        assert!("sideways".parse::<DependenceMode>().is_err());
    }

    #[test]
    fn long_csv() {
        let e = ens(vec![vec![1.5, 2.0]]);
        let mut buf = Vec::new();
        e.write_long_csv(&mut buf, true).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "origin,path,h,value\n0,1,1,1.5\n0,1,2,2\n");
    }
}
