use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{bucket_means, BenchmarkError};
use crate::ensemble::{DependenceMode, EnsembleForecast};
use crate::rng;
use crate::series::{CalendarContext, DayType, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NaiveKind {
    /// Average of each hour of the day.
    Mean,
    /// Average of each hour of the day per day type.
    Fm,
    /// Last week's value on Mondays, Saturdays and Sundays, yesterday's
    /// otherwise.
    Mrw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveModel {
    pub kind: NaiveKind,
    /// Hourly averages indexed by hour of day (`Mean`) or by
    /// `day type * 24 + hour` (`Fm`); empty for `Mrw`. Holiday entries are
    /// `None` when the calendar has no holidays.
    pub profile: Vec<Option<f64>>,
    pub residuals: Vec<f64>,
}

fn mrw_lag(ctx: &CalendarContext, t: usize) -> usize {
    match ctx.day_of_week(t) {
        0 | 5 | 6 => 168,
        _ => 24,
    }
}

fn bucket_of(kind: NaiveKind, ctx: &CalendarContext, t: usize) -> usize {
    match kind {
        NaiveKind::Mean => ctx.hour_of_day(t),
        NaiveKind::Fm => ctx.day_type(t).index() * 24 + ctx.hour_of_day(t),
        NaiveKind::Mrw => 0,
    }
}

fn bucket_label(kind: NaiveKind, bucket: usize) -> String {
    match kind {
        NaiveKind::Fm => format!("{:?} hour {}", DayType::ALL[bucket / 24], bucket % 24),
        _ => format!("hour {bucket}"),
    }
}

/// Fits a naive benchmark on `values` at calendar indices
/// `offset..offset + values.len()`.
pub fn fit_naive(
    values: &[f64],
    offset: usize,
    ctx: &CalendarContext,
    kind: NaiveKind,
) -> Result<NaiveModel, BenchmarkError> {
    let end = offset + values.len();
    match kind {
        NaiveKind::Mrw => {
            if values.len() <= 168 {
                return Err(BenchmarkError::SeriesTooShort {
                    needed: 169,
                    available: values.len(),
                });
            }
            let residuals = (offset + 168..end)
                .map(|t| values[t - offset] - values[t - offset - mrw_lag(ctx, t)])
                .collect();
            Ok(NaiveModel {
                kind,
                profile: Vec::new(),
                residuals,
            })
        }
        NaiveKind::Mean | NaiveKind::Fm => {
            let n_buckets = if kind == NaiveKind::Mean { 24 } else { 24 * DayType::ALL.len() };
            let profile = bucket_means(values, offset, n_buckets, |t| bucket_of(kind, ctx, t));
            let holidays_possible = ctx.calendar().count() > 0;
            for (b, p) in profile.iter().enumerate() {
                let is_holiday = kind == NaiveKind::Fm && b / 24 == DayType::Holiday.index();
                if p.is_none() && (holidays_possible || !is_holiday) {
                    return Err(BenchmarkError::EmptyBucket(bucket_label(kind, b)));
                }
            }
            let residuals = (offset..end)
                .map(|t| values[t - offset] - profile[bucket_of(kind, ctx, t)].unwrap_or(0.0))
                .collect();
            Ok(NaiveModel {
                kind,
                profile,
                residuals,
            })
        }
    }
}

impl NaiveModel {
    pub fn parameter_count(&self) -> usize {
        self.profile.iter().flatten().count()
    }

    /// Deterministic forecast for `origin..origin + h`. `Mrw` reuses its
    /// own forecasts once the lag reaches past the origin.
    pub fn point_forecast(
        &self,
        history: &TimeSeries,
        ctx: &CalendarContext,
        origin: usize,
        h: usize,
    ) -> Result<Vec<f64>, BenchmarkError> {
        if origin + h > ctx.len() {
            return Err(BenchmarkError::HorizonBeyondCalendar {
                needed: origin + h,
                available: ctx.len(),
            });
        }
        let mut out = Vec::with_capacity(h);
        for i in 0..h {
            let t = origin + i;
            let v = match self.kind {
                NaiveKind::Mrw => {
                    let k = mrw_lag(ctx, t);
                    if k <= i {
                        out[i - k]
                    } else {
                        let s = t
                            .checked_sub(k)
                            .ok_or(BenchmarkError::MissingLag { index: t, lag: k })?;
                        history
                            .get(s)
                            .ok_or(BenchmarkError::MissingLag { index: t, lag: k })?
                    }
                }
                kind => {
                    let b = bucket_of(kind, ctx, t);
                    self.profile[b].ok_or_else(|| BenchmarkError::EmptyBucket(bucket_label(kind, b)))?
                }
            };
            out.push(v);
        }
        Ok(out)
    }

    /// Point forecast plus independent bootstrap draws of the in-sample
    /// residuals for every path and hour.
    pub fn forecast(
        &self,
        history: &TimeSeries,
        ctx: &CalendarContext,
        origin: usize,
        h: usize,
        m: usize,
        seed: u64,
    ) -> Result<EnsembleForecast, BenchmarkError> {
        let point = self.point_forecast(history, ctx, origin, h)?;
        let paths = bootstrap_paths(&point, &self.residuals, m, seed)?;
        Ok(EnsembleForecast::new(paths, origin, seed, DependenceMode::Standard)?)
    }
}

pub(crate) fn bootstrap_paths(
    point: &[f64],
    pool: &[f64],
    m: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>, BenchmarkError> {
    if pool.is_empty() {
        return Err(BenchmarkError::EmptyResiduals);
    }
    Ok((0..m)
        .into_par_iter()
        .map(|path| {
            let mut rng = rng::substream(seed, path as u64);
            point
                .iter()
                .map(|p| p + pool[rng.random_range(0..pool.len())])
                .collect()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{Holiday, HolidayCalendar, HolidayClass, HolidayRule};
    use chrono::NaiveDate;

    // 2015-01-05 is a Monday
    fn ctx(len: usize) -> CalendarContext {
        let start = NaiveDate::from_ymd_opt(2015, 1, 5).unwrap().and_hms_opt(0, 0, 0).unwrap();
        CalendarContext::for_series(start, len, HolidayCalendar::empty())
    }

    #[test]
    fn constant_series() {
        let c = ctx(400);
        let values = vec![3.5; 336];
        for kind in [NaiveKind::Mean, NaiveKind::Mrw] {
            let m = fit_naive(&values, 0, &c, kind).unwrap();
            assert!(m.profile.iter().all(|&v| v == Some(3.5)));
            assert!(m.residuals.iter().all(|&e| e == 0.0));
        }
    }

    #[test]
    fn fm_monday_average() {
        let cal = HolidayCalendar::new(vec![Holiday {
            name: "mid_week".into(),
            rule: HolidayRule::FixedDate { month: 1, day: 7 },
            class: HolidayClass::FixedDate,
        }])
        .unwrap();
        let start = NaiveDate::from_ymd_opt(2015, 1, 5).unwrap().and_hms_opt(0, 0, 0).unwrap();
        let c = CalendarContext::for_series(start, 24 * 15, cal);
        let mut values = vec![1.0; 24 * 14];
        values[0] = 10.0;
        values[168] = 20.0;
        let m = fit_naive(&values, 0, &c, NaiveKind::Fm).unwrap();
        assert_eq!(m.profile[DayType::Monday.index() * 24], Some(15.0));
        assert_eq!(m.parameter_count(), 144);
    }

    #[test]
    fn fm_without_holiday_calendar_skips_holiday_bucket() {
        let c = ctx(24 * 15);
        let m = fit_naive(&vec![1.0; 24 * 14], 0, &c, NaiveKind::Fm).unwrap();
        assert_eq!(m.parameter_count(), 120);
    }

    #[test]
    fn fm_empty_holiday_bucket_is_reported() {
        let start = NaiveDate::from_ymd_opt(2015, 1, 5).unwrap().and_hms_opt(0, 0, 0).unwrap();
        let c = CalendarContext::for_series(start, 24 * 15, HolidayCalendar::german_default());
        let err = fit_naive(&vec![1.0; 24 * 14], 0, &c, NaiveKind::Fm).unwrap_err();
        assert!(matches!(err, BenchmarkError::EmptyBucket(ref b) if b.starts_with("Holiday")));
    }

    #[test]
    fn mrw_rule_and_parameters() {
        let c = ctx(24 * 30);
        let values: Vec<f64> = (0..24 * 21).map(|t| t as f64).collect();
        let history = TimeSeries::from_values(c.start(), values.clone()).unwrap();
        let m = fit_naive(&values, 0, &c, NaiveKind::Mrw).unwrap();
        assert_eq!(m.parameter_count(), 0);
        // origin at Monday 00:00 of week 4; Tuesday hours use lag 24
        let origin = 24 * 21;
        let point = m.point_forecast(&history, &c, origin, 48).unwrap();
        assert_eq!(point[0], values[origin - 168]);
        assert_eq!(point[24], point[0]);
        // Saturday uses lag 168
        let sat = 24 * 19 + 5;
        let p = m.point_forecast(&history, &c, sat, 1).unwrap();
        assert_eq!(p[0], values[sat - 168]);
        let tue = 24 * 15 + 3;
        let p = m.point_forecast(&history, &c, tue, 1).unwrap();
        assert_eq!(p[0], values[tue - 24]);
    }

    #[test]
    fn zero_pool_collapses_to_point_path() {
        let c = ctx(24 * 10);
        let model = NaiveModel {
            kind: NaiveKind::Mean,
            profile: (0..24).map(|h| Some(f64::from(h))).collect(),
            residuals: vec![0.0; 5],
        };
        let history = TimeSeries::from_values(c.start(), vec![0.0; 24]).unwrap();
        let ens = model.forecast(&history, &c, 24, 24, 7, 1).unwrap();
        let point = model.point_forecast(&history, &c, 24, 24).unwrap();
        assert!(ens.paths().iter().all(|p| p == &point));
    }
}
