use std::fmt;

use serde::{Deserialize, Serialize};

use super::spline::PeriodicBasis;
use crate::series::{CalendarContext, HolidayClass};

/// Semantic meaning of a single regressor column. Hours are clock hours
/// (0-23), holidays are 0-based positions in the holiday calendar and
/// spline indices are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Term {
    Constant,
    /// 1 iff the hour of day equals `hour`.
    HourOfDay { hour: usize },
    /// 1 iff the hour of day is at least `hour`.
    HourOfDayCum { hour: usize },
    /// 1 iff the hour of week equals `hour` (Monday 00:00 is 0).
    HourOfWeek { hour: usize },
    Spline { index: usize, cumulative: bool },
    /// 1 on all 24 hours of holiday `holiday`.
    Holiday { holiday: usize },
    /// Hourly dummy restricted to days of a holiday class.
    HolidayHour {
        class: HolidayClass,
        hour: usize,
        cumulative: bool,
    },
    /// Lagged demand `Y_{t-lag}`.
    Lag { lag: usize },
    /// Lagged squared mean residual `eps_{t-lag}^2`.
    SquaredResidualLag { lag: usize },
    LagHourOfDay { lag: usize, hour: usize },
    LagHoliday { lag: usize, holiday: usize },
}

/// Model component a term belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Constant,
    Daily,
    Weekly,
    Holiday,
    Annual,
    Autoregressive,
    Interaction,
    Arch,
}

impl Term {
    pub fn family(&self) -> Family {
        match self {
            Term::Constant => Family::Constant,
            Term::HourOfDay { .. } | Term::HourOfDayCum { .. } => Family::Daily,
            Term::HourOfWeek { .. } => Family::Weekly,
            Term::Spline { .. } => Family::Annual,
            Term::Holiday { .. } | Term::HolidayHour { .. } => Family::Holiday,
            Term::Lag { .. } => Family::Autoregressive,
            Term::SquaredResidualLag { .. } => Family::Arch,
            Term::LagHourOfDay { .. } | Term::LagHoliday { .. } => Family::Interaction,
        }
    }

    /// Lag the term reads, if any.
    pub fn lag(&self) -> Option<usize> {
        match *self {
            Term::Lag { lag }
            | Term::SquaredResidualLag { lag }
            | Term::LagHourOfDay { lag, .. }
            | Term::LagHoliday { lag, .. } => Some(lag),
            _ => None,
        }
    }

    /// Deterministic part of the term at calendar index `t` (the lagged
    /// factor excluded). Lag terms return 1 so that the full value is the
    /// product with the lagged source value.
    pub fn calendar_factor(&self, ctx: &CalendarContext, t: usize, basis: &PeriodicBasis) -> f64 {
        let ind = |b: bool| if b { 1.0 } else { 0.0 };
        match *self {
            Term::Constant => 1.0,
            Term::HourOfDay { hour } => ind(ctx.hour_of_day(t) == hour),
            Term::HourOfDayCum { hour } => ind(ctx.hour_of_day(t) >= hour),
            Term::HourOfWeek { hour } => ind(ctx.hour_of_week(t) == hour),
            Term::Spline { index, cumulative } => {
                let pos = ctx.position_in_year(t);
                if cumulative {
                    basis.cumulative_value(index, pos)
                } else {
                    basis.value(index, pos)
                }
            }
            Term::Holiday { holiday } => ind(ctx.holiday_active(t, holiday)),
            Term::HolidayHour {
                class,
                hour,
                cumulative,
            } => {
                let h = ctx.hour_of_day(t);
                let on_hour = if cumulative { h >= hour } else { h == hour };
                ind(on_hour && ctx.class_active(t, class))
            }
            Term::Lag { .. } | Term::SquaredResidualLag { .. } => 1.0,
            Term::LagHourOfDay { hour, .. } => ind(ctx.hour_of_day(t) == hour),
            Term::LagHoliday { holiday, .. } => ind(ctx.holiday_active(t, holiday)),
        }
    }

    /// Full value of the term at `t`; `lagged(k)` supplies the lag source
    /// at `t - k`.
    pub fn value(
        &self,
        ctx: &CalendarContext,
        t: usize,
        basis: &PeriodicBasis,
        lagged: impl Fn(usize) -> Option<f64>,
    ) -> Option<f64> {
        let factor = self.calendar_factor(ctx, t, basis);
        match self.lag() {
            None => Some(factor),
            Some(k) => lagged(k).map(|y| y * factor),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let class_tag = |c: HolidayClass| match c {
            HolidayClass::FixedWeekday => "FWH",
            HolidayClass::FixedDate => "FDH",
        };
        match *self {
            Term::Constant => write!(f, "const"),
            Term::HourOfDay { hour } => write!(f, "HoD_{}", hour + 1),
            Term::HourOfDayCum { hour } => write!(f, "HoDcum_{}", hour + 1),
            Term::HourOfWeek { hour } => write!(f, "HoW_{}", hour + 1),
            Term::Spline { index, cumulative } => {
                write!(f, "{}_{}", if cumulative { "Bcum" } else { "B" }, index + 1)
            }
            Term::Holiday { holiday } => write!(f, "HD_{}", holiday + 1),
            Term::HolidayHour {
                class,
                hour,
                cumulative,
            } => write!(
                f,
                "{}{}_{}",
                class_tag(class),
                if cumulative { "cum" } else { "" },
                hour + 1
            ),
            Term::Lag { lag } => write!(f, "lag_{lag}"),
            Term::SquaredResidualLag { lag } => write!(f, "sqres_lag_{lag}"),
            Term::LagHourOfDay { lag, hour } => write!(f, "lag{lag}_x_HoD_{}", hour + 1),
            Term::LagHoliday { lag, holiday } => write!(f, "lag{lag}_x_HD_{}", holiday + 1),
        }
    }
}
