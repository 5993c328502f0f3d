use serde::{Deserialize, Serialize};

use super::lags::{interaction_terms, LagSets};
use super::spline::SplineBasisConfig;
use super::{FeatureError, Term};
use crate::series::{HolidayCalendar, HolidayClass};

/// Whether a spec describes the conditional mean or the conditional
/// variance regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Mean,
    Variance,
}

/// A named group of regressor columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "block")]
pub enum Block {
    Constant,
    HourOfDay,
    HourOfDayCum,
    HourOfWeek,
    AnnualSpline { cumulative: bool },
    /// Day-level holiday dummies followed by the class-gated hourly
    /// dummies of fixed-weekday and fixed-date holidays.
    Holidays { cumulative: bool },
    /// Lagged lag source: demand for mean specs, squared mean residuals
    /// for variance specs.
    Lags { lags: Vec<usize> },
    /// Lagged demand times the 24 hour-of-day and the holiday dummies.
    Interactions { lags: Vec<usize> },
}

/// Declarative description of a feature matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub target: Target,
    #[serde(default)]
    pub spline: SplineBasisConfig,
    pub blocks: Vec<Block>,
}

impl FeatureSpec {
    /// Conditional-mean regressors: constant, daily, cumulative daily,
    /// weekly, cumulative annual spline, cumulative holiday component,
    /// lags and lag interactions.
    pub fn mean(lags: &LagSets) -> Self {
        Self {
            target: Target::Mean,
            spline: SplineBasisConfig::default(),
            blocks: vec![
                Block::Constant,
                Block::HourOfDay,
                Block::HourOfDayCum,
                Block::HourOfWeek,
                Block::AnnualSpline { cumulative: true },
                Block::Holidays { cumulative: true },
                Block::Lags {
                    lags: lags.mean.clone(),
                },
                Block::Interactions {
                    lags: lags.interaction.clone(),
                },
            ],
        }
    }

    /// Conditional-variance regressors: only non-cumulative deterministic
    /// blocks, since the variance regression is sign-constrained.
    pub fn variance(lags: &LagSets) -> Self {
        Self {
            target: Target::Variance,
            spline: SplineBasisConfig::default(),
            blocks: vec![
                Block::Constant,
                Block::HourOfDay,
                Block::HourOfWeek,
                Block::AnnualSpline { cumulative: false },
                Block::Holidays { cumulative: false },
                Block::Lags {
                    lags: lags.variance.clone(),
                },
            ],
        }
    }

    pub fn with_spline(mut self, spline: SplineBasisConfig) -> Self {
        self.spline = spline;
        self
    }

    pub fn validate(&self) -> Result<(), FeatureError> {
        self.spline.validate()?;
        for block in &self.blocks {
            if let Block::Lags { lags } | Block::Interactions { lags } = block {
                if lags.contains(&0) || lags.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(FeatureError::InvalidLagSets(
                        "lags must be positive and strictly increasing".into(),
                    ));
                }
            }
            if self.target == Target::Variance && matches!(block, Block::Interactions { .. }) {
                return Err(FeatureError::InvalidLagSets(
                    "variance specs cannot contain interaction blocks".into(),
                ));
            }
        }
        Ok(())
    }

    /// Largest lag any block reads.
    pub fn max_lag(&self) -> usize {
        self.blocks
            .iter()
            .filter_map(|b| match b {
                Block::Lags { lags } | Block::Interactions { lags } => lags.last().copied(),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Canonical, ordered column terms for a holiday calendar.
    pub fn terms(&self, calendar: &HolidayCalendar) -> Vec<Term> {
        let mut terms = Vec::new();
        for block in &self.blocks {
            match block {
                Block::Constant => terms.push(Term::Constant),
                Block::HourOfDay => terms.extend((1..24).map(|hour| Term::HourOfDay { hour })),
                Block::HourOfDayCum => {
                    terms.extend((1..23).map(|hour| Term::HourOfDayCum { hour }))
                }
                Block::HourOfWeek => terms.extend((1..168).map(|hour| Term::HourOfWeek { hour })),
                Block::AnnualSpline { cumulative } => terms.extend(
                    (0..self.spline.n_basis - 1).map(|index| Term::Spline {
                        index,
                        cumulative: *cumulative,
                    }),
                ),
                Block::Holidays { cumulative } => {
                    terms.extend((0..calendar.count()).map(|holiday| Term::Holiday { holiday }));
                    for (class, n) in [
                        (HolidayClass::FixedWeekday, calendar.count_fixed_weekday()),
                        (HolidayClass::FixedDate, calendar.count_fixed_date()),
                    ] {
                        if n > 0 {
                            terms.extend((1..24).map(|hour| Term::HolidayHour {
                                class,
                                hour,
                                cumulative: *cumulative,
                            }));
                        }
                    }
                }
                Block::Lags { lags } => terms.extend(lags.iter().map(|&lag| match self.target {
                    Target::Mean => Term::Lag { lag },
                    Target::Variance => Term::SquaredResidualLag { lag },
                })),
                Block::Interactions { lags } => {
                    terms.extend(interaction_terms(lags, calendar.count()))
                }
            }
        }
        terms
    }

    pub fn column_names(&self, calendar: &HolidayCalendar) -> Vec<String> {
        self.terms(calendar).iter().map(Term::to_string).collect()
    }
}
