use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{bucket_means, BenchmarkError};
use crate::ensemble::{DependenceMode, EnsembleForecast};
use crate::rng;
use crate::series::{CalendarContext, TimeSeries};

pub const DEFAULT_MAX_ORDER: usize = 1500;

/// Seasonal profile removed before the AR fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeasonalVariant {
    /// Hour-of-day profile.
    Daily,
    /// Hour-of-week profile.
    Weekly,
}

impl SeasonalVariant {
    fn buckets(self) -> usize {
        match self {
            SeasonalVariant::Daily => 24,
            SeasonalVariant::Weekly => 168,
        }
    }

    fn bucket(self, ctx: &CalendarContext, t: usize) -> usize {
        match self {
            SeasonalVariant::Daily => ctx.hour_of_day(t),
            SeasonalVariant::Weekly => ctx.hour_of_week(t),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeasonalArModel {
    pub variant: SeasonalVariant,
    pub profile: Vec<f64>,
    /// Mean of the deseasonalized series.
    pub level: f64,
    pub phi: Vec<f64>,
    pub innovation_variance: f64,
    /// `n ln σ²_p + p ln n` for `p = 0..=p_max`.
    pub bic: Vec<f64>,
    pub residuals: Vec<f64>,
}

/// Biased sample autocovariances `γ_0..=γ_max_lag` of `x` around `mean`.
pub fn autocovariances(x: &[f64], mean: f64, max_lag: usize) -> Vec<f64> {
    let n = x.len();
    let d: Vec<f64> = x.iter().map(|v| v - mean).collect();
    (0..=max_lag)
        .into_par_iter()
        .map(|k| d[..n - k].iter().zip(&d[k..]).map(|(a, b)| a * b).sum::<f64>() / n as f64)
        .collect()
}

/// Levinson-Durbin recursion. Returns innovation variances and AR
/// coefficients of every order up to `p_max`, stopping early if the
/// recursion breaks down numerically.
fn levinson(gamma: &[f64], p_max: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>), BenchmarkError> {
    if !(gamma[0] > 0.0) {
        return Err(BenchmarkError::SingularToeplitz(0));
    }
    let mut sigma2 = vec![gamma[0]];
    let mut phis = vec![Vec::new()];
    let mut phi: Vec<f64> = Vec::new();
    for p in 1..=p_max {
        let acc: f64 = phi.iter().enumerate().map(|(j, a)| a * gamma[p - 1 - j]).sum();
        let prev = sigma2[p - 1];
        let kappa = (gamma[p] - acc) / prev;
        let next_sigma2 = prev * (1.0 - kappa * kappa);
        if !(next_sigma2 > 0.0) || !kappa.is_finite() {
            break;
        }
        let mut next = Vec::with_capacity(p);
        for j in 0..p - 1 {
            next.push(phi[j] - kappa * phi[p - 2 - j]);
        }
        next.push(kappa);
        phi = next;
        sigma2.push(next_sigma2);
        phis.push(phi.clone());
    }
    Ok((sigma2, phis))
}

/// Yule-Walker AR fit of the deseasonalized series with BIC order
/// selection over `0..=p_max`.
pub fn fit_seasonal_ar(
    values: &[f64],
    offset: usize,
    ctx: &CalendarContext,
    variant: SeasonalVariant,
    p_max: usize,
) -> Result<SeasonalArModel, BenchmarkError> {
    let needed = 2 * (p_max + 1);
    if values.len() < needed {
        return Err(BenchmarkError::SeriesTooShort {
            needed,
            available: values.len(),
        });
    }
    let profile = bucket_means(values, offset, variant.buckets(), |t| variant.bucket(ctx, t))
        .into_iter()
        .enumerate()
        .map(|(b, p)| p.ok_or_else(|| BenchmarkError::EmptyBucket(format!("bucket {b}"))))
        .collect::<Result<Vec<f64>, _>>()?;
    let x: Vec<f64> = values
        .iter()
        .enumerate()
        .map(|(i, y)| y - profile[variant.bucket(ctx, offset + i)])
        .collect();
    let n = x.len();
    let level = x.iter().sum::<f64>() / n as f64;
    let gamma = autocovariances(&x, level, p_max);

    let (sigma2, phis) = levinson(&gamma, p_max)?;
    let ln_n = (n as f64).ln();
    let bic: Vec<f64> = sigma2
        .iter()
        .enumerate()
        .map(|(p, s2)| n as f64 * s2.ln() + p as f64 * ln_n)
        .collect();
    let mut best = 0;
    for p in 1..bic.len() {
        if bic[p] < bic[best] {
            best = p;
        }
    }
    let phi = phis[best].clone();
    let residuals = (best..n)
        .map(|t| {
            let ar: f64 = phi.iter().enumerate().map(|(j, a)| a * (x[t - 1 - j] - level)).sum();
            x[t] - level - ar
        })
        .collect();
    Ok(SeasonalArModel {
        variant,
        profile,
        level,
        phi,
        innovation_variance: sigma2[best],
        bic,
        residuals,
    })
}

impl SeasonalArModel {
    pub fn order(&self) -> usize {
        self.phi.len()
    }

    pub fn parameter_count(&self) -> usize {
        self.profile.len() + self.phi.len()
    }

    /// Recursive AR simulation on the deseasonalized scale with
    /// independent residual draws, then the profile is added back.
    pub fn forecast(
        &self,
        history: &TimeSeries,
        ctx: &CalendarContext,
        origin: usize,
        h: usize,
        m: usize,
        seed: u64,
    ) -> Result<EnsembleForecast, BenchmarkError> {
        if origin + h > ctx.len() {
            return Err(BenchmarkError::HorizonBeyondCalendar {
                needed: origin + h,
                available: ctx.len(),
            });
        }
        if self.residuals.is_empty() {
            return Err(BenchmarkError::EmptyResiduals);
        }
        let p = self.order();
        if p > origin {
            return Err(BenchmarkError::MissingLag { index: origin, lag: p });
        }
        // deviations from the level, oldest first
        let past: Vec<f64> = (origin - p..origin)
            .map(|s| {
                history
                    .get(s)
                    .map(|y| y - self.profile[self.variant.bucket(ctx, s)] - self.level)
                    .ok_or(BenchmarkError::MissingLag { index: origin, lag: origin - s })
            })
            .collect::<Result<_, _>>()?;
        let seasonal: Vec<f64> = (0..h)
            .map(|i| self.profile[self.variant.bucket(ctx, origin + i)] + self.level)
            .collect();
        let pool = &self.residuals;
        let paths = (0..m)
            .into_par_iter()
            .map(|path| {
                let mut rng = rng::substream(seed, path as u64);
                let mut dev = past.clone();
                dev.reserve(h);
                let mut y = Vec::with_capacity(h);
                for s in &seasonal {
                    let len = dev.len();
                    let ar: f64 = self.phi.iter().enumerate().map(|(j, a)| a * dev[len - 1 - j]).sum();
                    let d = ar + pool[rng.random_range(0..pool.len())];
                    dev.push(d);
                    y.push(s + d);
                }
                y
            })
            .collect();
        Ok(EnsembleForecast::new(paths, origin, seed, DependenceMode::Standard)?)
    }
}
