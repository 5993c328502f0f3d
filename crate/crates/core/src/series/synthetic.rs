use std::f64::consts::PI;

use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime, Timelike};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};

use super::{SeriesError, TimeSeries, ANNUAL_PERIOD_HOURS};

/// Deterministic seasonal mean `m(t)` of a synthetic process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SeasonalMean {
    pub level: f64,
    /// Amplitude of a 24-hour sine.
    pub daily_amplitude: f64,
    /// Level shift applied from `daily_step_hour` until midnight.
    pub daily_step: f64,
    pub daily_step_hour: u32,
    /// Level shift on Saturdays and Sundays.
    pub weekend_effect: f64,
    /// Amplitude of a one-year sine.
    pub annual_amplitude: f64,
}

impl Default for SeasonalMean {
    fn default() -> Self {
        Self {
            level: 0.0,
            daily_amplitude: 0.0,
            daily_step: 0.0,
            daily_step_hour: 12,
            weekend_effect: 0.0,
            annual_amplitude: 0.0,
        }
    }
}

impl SeasonalMean {
    pub fn at(&self, ts: NaiveDateTime) -> f64 {
        let hour = ts.hour();
        let mut m = self.level + self.daily_amplitude * (2.0 * PI * hour as f64 / 24.0).sin();
        if hour >= self.daily_step_hour {
            m += self.daily_step;
        }
        if ts.weekday().number_from_monday() >= 6 {
            m += self.weekend_effect;
        }
        if self.annual_amplitude != 0.0 {
            let jan1 = NaiveDate::from_ymd_opt(ts.year(), 1, 1)
                .and_then(|d| d.and_hms_opt(0, 0, 0))
                .expect("january first");
            let pos = (ts - jan1).num_hours() as f64;
            m += self.annual_amplitude * (2.0 * PI * pos / ANNUAL_PERIOD_HOURS).sin();
        }
        m
    }
}

/// How autoregressive terms enter the recursion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArForm {
    /// `Y_t = m(t) + x_t`, `x_t = sum phi_k x_{t-k} + eps_t`.
    #[default]
    Deviation,
    /// `Y_t = m(t) + sum phi_k Y_{t-k} + eps_t`.
    Regression,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "law")]
pub enum Innovation {
    #[default]
    Gaussian,
    /// Student-t rescaled to unit variance; requires `df > 2`.
    StudentT { df: f64 },
}

/// Configuration of an ARX process with ARCH errors:
/// `eps_t = noise_scale * u_t`, `u_t = sigma_t Z_t`,
/// `sigma_t^2 = arch_intercept + sum arch_k u_{t-k}^2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticConfig {
    pub start: NaiveDateTime,
    pub length: usize,
    pub burn_in: usize,
    pub mean: SeasonalMean,
    pub ar: Vec<f64>,
    pub ar_form: ArForm,
    pub arch_intercept: f64,
    pub arch: Vec<f64>,
    pub noise_scale: f64,
    pub innovation: Innovation,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            start: NaiveDate::from_ymd_opt(2015, 1, 5)
                .and_then(|d| d.and_hms_opt(0, 0, 0))
                .expect("valid start"),
            length: 24 * 7 * 8,
            burn_in: 500,
            mean: SeasonalMean::default(),
            ar: vec![],
            ar_form: ArForm::Deviation,
            arch_intercept: 1.0,
            arch: vec![],
            noise_scale: 1.0,
            innovation: Innovation::Gaussian,
        }
    }
}

/// Checks stationarity of `x_t = sum phi_k x_{t-k} + e_t` by stepping the
/// coefficients down to partial autocorrelations; the process is
/// stationary iff every partial autocorrelation lies strictly inside
/// (-1, 1).
pub fn check_ar_stationary(phi: &[f64]) -> Result<(), SeriesError> {
    let mut a = phi.to_vec();
    while let Some(&kappa) = a.last() {
        let k = a.len();
        if !kappa.is_finite() || kappa.abs() >= 1.0 {
            return Err(SeriesError::UnstableProcess(format!(
                "partial autocorrelation {kappa} at lag {k} is outside (-1, 1)"
            )));
        }
        let denom = 1.0 - kappa * kappa;
        let prev: Vec<f64> = (0..k - 1)
            .map(|j| (a[j] + kappa * a[k - 2 - j]) / denom)
            .collect();
        a = prev;
    }
    Ok(())
}

/// Generates a synthetic hourly series. Identical `(config, seed)` pairs
/// produce identical output.
pub fn simulate_synthetic(config: &SyntheticConfig, seed: u64) -> Result<TimeSeries, SeriesError> {
    if config.length == 0 {
        return Err(SeriesError::Empty);
    }
    check_ar_stationary(&config.ar)?;
    if config.arch_intercept < 0.0 || config.arch.iter().any(|&a| a < 0.0) {
        return Err(SeriesError::NegativeVarianceParams(
            "ARCH intercept and coefficients must be non-negative".into(),
        ));
    }
    if config.noise_scale < 0.0 {
        return Err(SeriesError::NegativeVarianceParams(
            "noise scale must be non-negative".into(),
        ));
    }
    if config.arch.iter().sum::<f64>() >= 1.0 {
        return Err(SeriesError::UnstableProcess(
            "ARCH coefficients must sum to less than one".into(),
        ));
    }
    let draw_scale = match config.innovation {
        Innovation::Gaussian => None,
        Innovation::StudentT { df } => {
            if df <= 2.0 {
                return Err(SeriesError::NegativeVarianceParams(format!(
                    "Student-t innovations need df > 2, got {df}"
                )));
            }
            Some((StudentT::new(df).expect("df > 2"), ((df - 2.0) / df).sqrt()))
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = config.burn_in + config.length;
    let t0 = config.start - Duration::hours(config.burn_in as i64);
    let p = config.ar.len();
    let phi_sum: f64 = config.ar.iter().sum();

    let means: Vec<f64> = (0..total)
        .map(|i| config.mean.at(t0 + Duration::hours(i as i64)))
        .collect();
    let mut y = vec![0.0; total];
    let mut dev = vec![0.0; total];
    let mut u = vec![0.0_f64; total];
    for t in 0..total {
        let mut var = config.arch_intercept;
        for (k, a) in config.arch.iter().enumerate() {
            let lag = k + 1;
            var += a * if t >= lag { u[t - lag].powi(2) } else { config.arch_intercept };
        }
        let z: f64 = match &draw_scale {
            None => StandardNormal.sample(&mut rng),
            Some((dist, scale)) => dist.sample(&mut rng) * scale,
        };
        u[t] = var.sqrt() * z;
        let eps = config.noise_scale * u[t];
        match config.ar_form {
            ArForm::Deviation => {
                let ar: f64 = (0..p)
                    .filter(|k| t > *k)
                    .map(|k| config.ar[k] * dev[t - k - 1])
                    .sum();
                dev[t] = ar + eps;
                y[t] = means[t] + dev[t];
            }
            ArForm::Regression => {
                // Pre-sample values sit at the unconditional level of m(t).
                let init = means[t] / (1.0 - phi_sum);
                let ar: f64 = (0..p)
                    .map(|k| config.ar[k] * if t > k { y[t - k - 1] } else { init })
                    .sum();
                y[t] = means[t] + ar + eps;
            }
        }
    }
    TimeSeries::from_values(config.start, y.split_off(config.burn_in))
}
