use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::ScoringError;

/// Diebold-Mariano comparison of two loss series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DmResult {
    pub statistic: f64,
    /// Mean of `loss_a - loss_b`.
    pub mean_differential: f64,
    pub long_run_variance: f64,
    pub truncation_lag: usize,
    /// p-value of `H1: E[loss_a] < E[loss_b]` (a is better).
    pub p_less: f64,
    /// p-value of `H1: E[loss_a] > E[loss_b]` (b is better).
    pub p_greater: f64,
}

impl DmResult {
    /// Whether the one-sided test in favour of `a` rejects at `level`.
    pub fn a_better(&self, level: f64) -> bool {
        self.p_less < level
    }

    pub fn b_better(&self, level: f64) -> bool {
        self.p_greater < level
    }
}

/// Asymptotic z-test on the mean of `d = loss_a - loss_b` with a
/// Newey-West (Bartlett) long-run variance truncated at `⌊N^{1/3}⌋`.
pub fn dm_test(loss_a: &[f64], loss_b: &[f64]) -> Result<DmResult, ScoringError> {
    if loss_a.len() != loss_b.len() {
        return Err(ScoringError::DimensionMismatch(format!(
            "loss series of lengths {} and {}",
            loss_a.len(),
            loss_b.len()
        )));
    }
    let n = loss_a.len();
    if n < 10 {
        return Err(ScoringError::InsufficientData {
            needed: 10,
            available: n,
        });
    }
    let d: Vec<f64> = loss_a.iter().zip(loss_b).map(|(a, b)| a - b).collect();
    let nf = n as f64;
    let mean = d.iter().sum::<f64>() / nf;
    let c: Vec<f64> = d.iter().map(|x| x - mean).collect();
    let lag = (nf.cbrt() + 1e-9).floor() as usize;
    let autocov = |k: usize| c[k..].iter().zip(&c[..n - k]).map(|(a, b)| a * b).sum::<f64>() / nf;
    let mut lrv = autocov(0);
    for k in 1..=lag {
        lrv += 2.0 * (1.0 - k as f64 / (lag + 1) as f64) * autocov(k);
    }
    if !(lrv > 0.0) {
        return Err(ScoringError::DegenerateDifferential);
    }
    let statistic = mean / (lrv / nf).sqrt();
    let normal = Normal::standard();
    Ok(DmResult {
        statistic,
        mean_differential: mean,
        long_run_variance: lrv,
        truncation_lag: lag,
        p_less: normal.cdf(statistic),
        p_greater: normal.sf(statistic),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn identical_losses_are_degenerate() {
        let a: Vec<f64> = (0..20).map(f64::from).collect();
        assert_eq!(dm_test(&a, &a).unwrap_err(), ScoringError::DegenerateDifferential);
        assert!(matches!(dm_test(&a[..5], &a[..5]), Err(ScoringError::InsufficientData { .. })));
    }

    #[test]
    fn shifted_differential() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let b = vec![0.0; 400];
        let a: Vec<f64> = (0..400).map(|_| 0.5 + rng.sample::<f64, _>(StandardNormal)).collect();
        let r = dm_test(&a, &b).unwrap();
        assert!((r.statistic - 10.0).abs() < 2.0, "{}", r.statistic);
        assert_eq!(r.truncation_lag, 7);
        assert!(r.b_better(0.05) && !r.a_better(0.05));
        assert!((r.p_less + r.p_greater - 1.0).abs() < 1e-12);
    }
}
