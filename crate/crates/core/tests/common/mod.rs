#![allow(dead_code)]

use chrono::{NaiveDate, NaiveDateTime};
use hydrocast::series::{
    simulate_synthetic, ArForm, CalendarContext, HolidayCalendar, SeasonalMean, SyntheticConfig,
    TimeSeries,
};

pub fn monday() -> NaiveDateTime {
    NaiveDate::from_ymd_opt(2015, 1, 5).unwrap().and_hms_opt(0, 0, 0).unwrap()
}

/// Daily step mean, `Y_t = m(t) + phi Y_{t-1} + u_t` with ARCH(1) errors.
pub fn arx_arch(length: usize, phi: f64, alpha: f64, seed: u64) -> (TimeSeries, CalendarContext) {
    arx_arch_with_step(length, 5.0, phi, alpha, seed)
}

pub fn arx_arch_with_step(
    length: usize,
    step: f64,
    phi: f64,
    alpha: f64,
    seed: u64,
) -> (TimeSeries, CalendarContext) {
    let cfg = SyntheticConfig {
        start: monday(),
        length,
        burn_in: 2000,
        mean: SeasonalMean {
            level: 10.0,
            daily_step: step,
            daily_step_hour: 12,
            ..Default::default()
        },
        ar: vec![phi],
        ar_form: ArForm::Regression,
        arch_intercept: 1.0,
        arch: if alpha > 0.0 { vec![alpha] } else { vec![] },
        ..Default::default()
    };
    let series = simulate_synthetic(&cfg, seed).unwrap();
    let ctx = CalendarContext::for_series(monday(), length + 48, HolidayCalendar::empty());
    (series, ctx)
}
