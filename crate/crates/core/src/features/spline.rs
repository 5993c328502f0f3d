//! Periodic and cumulative B-spline bases for smooth annual seasonality.

use serde::{Deserialize, Serialize};

use super::FeatureError;
use crate::series::ANNUAL_PERIOD_HOURS;

/// Value at `t` of the single B-spline of `degree` on the knots
/// `knots[0] < ... < knots[degree + 1]`, via the Cox-de Boor recurrence.
pub fn bspline_value(t: f64, knots: &[f64], degree: usize) -> f64 {
    debug_assert_eq!(knots.len(), degree + 2);
    if degree == 0 {
        return if t >= knots[0] && t < knots[1] { 1.0 } else { 0.0 };
    }
    let left_span = knots[degree] - knots[0];
    let right_span = knots[degree + 1] - knots[1];
    let left = if left_span > 0.0 {
        (t - knots[0]) / left_span * bspline_value(t, &knots[..=degree], degree - 1)
    } else {
        0.0
    };
    let right = if right_span > 0.0 {
        (knots[degree + 1] - t) / right_span * bspline_value(t, &knots[1..], degree - 1)
    } else {
        0.0
    };
    left + right
}

/// Geometry of a periodic B-spline basis: `n_basis` splines of odd
/// `degree`, equidistant knots with spacing `period / n_basis`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplineBasisConfig {
    pub degree: usize,
    pub period: f64,
    pub n_basis: usize,
}

impl Default for SplineBasisConfig {
    /// Cubic basis with four splines per (average) year.
    fn default() -> Self {
        Self {
            degree: 3,
            period: ANNUAL_PERIOD_HOURS,
            n_basis: 4,
        }
    }
}

impl SplineBasisConfig {
    pub fn knot_spacing(&self) -> f64 {
        self.period / self.n_basis as f64
    }

    pub fn validate(&self) -> Result<(), FeatureError> {
        if self.degree.is_multiple_of(2) {
            return Err(FeatureError::InvalidDegree(self.degree));
        }
        if !(self.period > 0.0) || self.n_basis < self.degree + 1 {
            return Err(FeatureError::InsufficientSpacing {
                n_basis: self.n_basis,
                degree: self.degree,
            });
        }
        Ok(())
    }

    /// Knots of the spline centred at zero.
    fn centred_knots(&self) -> Vec<f64> {
        let h = self.knot_spacing();
        let half = h * (self.degree + 1) as f64 / 2.0;
        (0..=self.degree + 1).map(|i| -half + i as f64 * h).collect()
    }
}

/// Evaluator for the periodic basis `B_1..B_K`; `B_j` is centred at
/// `(j - 1) * period / K`.
#[derive(Debug, Clone)]
pub struct PeriodicBasis {
    cfg: SplineBasisConfig,
    knots: Vec<f64>,
    wraps: i64,
}

impl PeriodicBasis {
    pub fn new(cfg: SplineBasisConfig) -> Result<Self, FeatureError> {
        cfg.validate()?;
        let support = cfg.knot_spacing() * (cfg.degree + 1) as f64;
        let wraps = (support / cfg.period).ceil() as i64 + 1;
        Ok(Self {
            cfg,
            knots: cfg.centred_knots(),
            wraps,
        })
    }

    pub fn config(&self) -> &SplineBasisConfig {
        &self.cfg
    }

    /// Periodic basis function `j` (0-based) at `t`.
    pub fn value(&self, j: usize, t: f64) -> f64 {
        let s = self.cfg.period;
        let shifted = (t - j as f64 * self.cfg.knot_spacing()).rem_euclid(s);
        (-self.wraps..=self.wraps)
            .map(|k| bspline_value(shifted - k as f64 * s, &self.knots, self.cfg.degree))
            .sum()
    }

    pub fn values(&self, t: f64) -> Vec<f64> {
        (0..self.cfg.n_basis).map(|j| self.value(j, t)).collect()
    }

    /// Cumulative basis `B_l^cum = B_1 + ... + B_l` (0-based `l`).
    pub fn cumulative_value(&self, l: usize, t: f64) -> f64 {
        (0..=l).map(|j| self.value(j, t)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn degree_zero_is_an_interval_indicator() {
        let knots = [2.0, 5.0];
        assert_eq!(bspline_value(2.0, &knots, 0), 1.0);
        assert_eq!(bspline_value(4.999, &knots, 0), 1.0);
        assert_eq!(bspline_value(5.0, &knots, 0), 0.0);
        assert_eq!(bspline_value(1.0, &knots, 0), 0.0);
    }

    #[test]
    fn uniform_cubic_matches_closed_form() {
        // Uniform cubic B-spline on knots 0..4 at the centre is 2/3 and at
        // a knot neighbour 1/6.
        let knots = [0.0, 1.0, 2.0, 3.0, 4.0];
        assert!((bspline_value(2.0, &knots, 3) - 2.0 / 3.0).abs() < 1e-15);
        assert!((bspline_value(1.0, &knots, 3) - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(bspline_value(4.5, &knots, 3), 0.0);
    }

    #[test]
    fn rejects_bad_geometry() {
        let even = SplineBasisConfig {
            degree: 2,
            ..SplineBasisConfig::default()
        };
        assert_eq!(PeriodicBasis::new(even).unwrap_err(), FeatureError::InvalidDegree(2));
        let sparse = SplineBasisConfig {
            n_basis: 3,
            ..SplineBasisConfig::default()
        };
        assert!(matches!(
            PeriodicBasis::new(sparse),
            Err(FeatureError::InsufficientSpacing { .. })
        ));
    }

    #[test]
    fn partition_of_unity_and_full_accumulation() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for cfg in [
            SplineBasisConfig::default(),
            SplineBasisConfig {
                degree: 3,
                period: 168.0,
                n_basis: 12,
            },
            SplineBasisConfig {
                degree: 1,
                period: 24.0,
                n_basis: 2,
            },
        ] {
            let basis = PeriodicBasis::new(cfg).unwrap();
            for _ in 0..20_000 {
                let t: f64 = rng.random_range(-3.0 * cfg.period..3.0 * cfg.period);
                let total: f64 = basis.values(t).iter().sum();
                assert!((total - 1.0).abs() < 1e-10, "sum {total} at {t}");
                let last = basis.cumulative_value(cfg.n_basis - 1, t);
                assert!((last - 1.0).abs() < 1e-10);
                assert!(basis.values(t).iter().all(|&b| b >= -1e-15));
            }
        }
    }

    #[test]
    fn basis_is_periodic_and_shifted() {
        let cfg = SplineBasisConfig::default();
        let basis = PeriodicBasis::new(cfg).unwrap();
        let h = cfg.knot_spacing();
        for t in [0.0, 100.0, 2000.0, 5000.5] {
            assert!((basis.value(0, t) - basis.value(0, t + cfg.period)).abs() < 1e-12);
            assert!((basis.value(1, t + h) - basis.value(0, t)).abs() < 1e-12);
        }
        // B_1 peaks at its centre.
        assert!(basis.value(0, 0.0) > basis.value(0, h / 2.0));
    }
}
