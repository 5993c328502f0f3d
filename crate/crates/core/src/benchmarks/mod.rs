//! Reference forecasters: naive hourly profiles, the modified random
//! walk, and seasonally adjusted Yule-Walker autoregressions. All emit
//! residual-bootstrap ensembles.

mod naive;
mod seasonal_ar;

pub use naive::{fit_naive, NaiveKind, NaiveModel};
pub use seasonal_ar::{autocovariances, fit_seasonal_ar, SeasonalArModel, SeasonalVariant, DEFAULT_MAX_ORDER};

use thiserror::Error;

use crate::ensemble::EnsembleError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BenchmarkError {
    #[error("no observations for {0}")]
    EmptyBucket(String),
    #[error("Toeplitz system is singular at order {0}")]
    SingularToeplitz(usize),
    #[error("series too short: {needed} observations needed, {available} available")]
    SeriesTooShort { needed: usize, available: usize },
    #[error("lag {lag} of index {index} is unavailable")]
    MissingLag { index: usize, lag: usize },
    #[error("calendar covers {available} hours but the forecast needs {needed}")]
    HorizonBeyondCalendar { needed: usize, available: usize },
    #[error("residual pool is empty")]
    EmptyResiduals,
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
}

/// Per-bucket arithmetic means; `None` for buckets without observations.
pub(crate) fn bucket_means(
    values: &[f64],
    offset: usize,
    n_buckets: usize,
    bucket: impl Fn(usize) -> usize,
) -> Vec<Option<f64>> {
    let mut sum = vec![0.0; n_buckets];
    let mut count = vec![0usize; n_buckets];
    for (i, v) in values.iter().enumerate() {
        let b = bucket(offset + i);
        sum[b] += v;
        count[b] += 1;
    }
    sum.iter()
        .zip(&count)
        .map(|(s, &c)| (c > 0).then(|| s / c as f64))
        .collect()
}
