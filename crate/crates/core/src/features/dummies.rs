//! Calendar dummy blocks. Every block drops its base category so that no
//! block is collinear with the constant.

use super::spline::PeriodicBasis;
use super::{FeatureBlock, Term};
use crate::series::{CalendarContext, HolidayClass};

fn indicator_block(
    rows: &[usize],
    terms: Vec<Term>,
    active: impl Fn(usize, usize) -> bool,
) -> FeatureBlock {
    let mut block = FeatureBlock::with_terms(&terms, rows.len());
    for (r, &t) in rows.iter().enumerate() {
        for (c, col) in block.columns.iter_mut().enumerate() {
            if active(c, t) {
                col[r] = 1.0;
            }
        }
    }
    block
}

/// Hour-of-day dummies. Plain: `HoD_2..HoD_24` (hour 0 is the base).
/// Cumulative: `HoDcum_2..HoDcum_23` with `HoDcum_i = 1{hour >= i - 1}`.
pub fn hod_dummies(ctx: &CalendarContext, rows: &[usize], cumulative: bool) -> FeatureBlock {
    if cumulative {
        let terms = (1..23).map(|hour| Term::HourOfDayCum { hour }).collect();
        indicator_block(rows, terms, |c, t| ctx.hour_of_day(t) > c)
    } else {
        let terms = (1..24).map(|hour| Term::HourOfDay { hour }).collect();
        indicator_block(rows, terms, |c, t| ctx.hour_of_day(t) == c + 1)
    }
}

/// Hour-of-week dummies `HoW_2..HoW_168`; Monday 00:00 is the base.
pub fn how_dummies(ctx: &CalendarContext, rows: &[usize]) -> FeatureBlock {
    let terms = (1..168).map(|hour| Term::HourOfWeek { hour }).collect();
    indicator_block(rows, terms, |c, t| ctx.hour_of_week(t) == c + 1)
}

/// One day-level dummy per holiday of the calendar.
pub fn hd_dummies(ctx: &CalendarContext, rows: &[usize]) -> FeatureBlock {
    let terms = (0..ctx.calendar().count())
        .map(|holiday| Term::Holiday { holiday })
        .collect();
    indicator_block(rows, terms, |c, t| ctx.holiday_active(t, c))
}

/// 23 hourly dummies active only on days of holidays of `class`; hour 0
/// is the base category.
pub fn holiday_hour_dummies(
    ctx: &CalendarContext,
    rows: &[usize],
    class: HolidayClass,
    cumulative: bool,
) -> FeatureBlock {
    let terms = (1..24)
        .map(|hour| Term::HolidayHour {
            class,
            hour,
            cumulative,
        })
        .collect();
    indicator_block(rows, terms, |c, t| {
        let h = ctx.hour_of_day(t);
        let on_hour = if cumulative { h > c } else { h == c + 1 };
        on_hour && ctx.class_active(t, class)
    })
}

/// Holiday component: `HD` block followed by the fixed-weekday and
/// fixed-date hourly blocks. Class blocks are omitted when the calendar
/// has no holiday of that class.
pub fn holiday_dummies(ctx: &CalendarContext, rows: &[usize], cumulative: bool) -> FeatureBlock {
    let mut block = hd_dummies(ctx, rows);
    let cal = ctx.calendar();
    if cal.count_fixed_weekday() > 0 {
        block.extend(holiday_hour_dummies(
            ctx,
            rows,
            HolidayClass::FixedWeekday,
            cumulative,
        ));
    }
    if cal.count_fixed_date() > 0 {
        block.extend(holiday_hour_dummies(
            ctx,
            rows,
            HolidayClass::FixedDate,
            cumulative,
        ));
    }
    block
}

/// Periodic annual B-spline block. The last basis function (or the last,
/// identically one, cumulative function) is dropped.
pub fn bspline_basis(
    ctx: &CalendarContext,
    rows: &[usize],
    basis: &PeriodicBasis,
    cumulative: bool,
) -> FeatureBlock {
    let k = basis.config().n_basis;
    let terms: Vec<Term> = (0..k - 1)
        .map(|index| Term::Spline { index, cumulative })
        .collect();
    let mut block = FeatureBlock::with_terms(&terms, rows.len());
    for (r, &t) in rows.iter().enumerate() {
        let values = basis.values(ctx.position_in_year(t));
        let mut acc = 0.0;
        for (c, col) in block.columns.iter_mut().enumerate() {
            acc += values[c];
            col[r] = if cumulative { acc } else { values[c] };
        }
    }
    block
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::HolidayCalendar;
    use chrono::NaiveDate;

    fn ctx(y: i32, m: u32, d: u32, len: usize) -> CalendarContext {
        let start = NaiveDate::from_ymd_opt(y, m, d)
            .unwrap()
            .and_hms_opt(0, 0, 0)
            .unwrap();
        CalendarContext::for_series(start, len, HolidayCalendar::german_default())
    }

    fn row(block: &FeatureBlock, r: usize) -> Vec<f64> {
        block.columns.iter().map(|c| c[r]).collect()
    }

    fn ones(block: &FeatureBlock, r: usize) -> Vec<String> {
        block
            .names
            .iter()
            .zip(row(block, r))
            .filter(|(_, v)| *v == 1.0)
            .map(|(n, _)| n.clone())
            .collect()
    }

    #[test]
    fn hod_reference_and_indicator() {
        let c = ctx(2015, 1, 5, 48);
        let rows: Vec<usize> = (0..48).collect();
        let plain = hod_dummies(&c, &rows, false);
        assert_eq!(plain.width(), 23);
        assert!(row(&plain, 0).iter().all(|&v| v == 0.0));
        assert_eq!(ones(&plain, 5), vec!["HoD_6"]);
    }

    #[test]
    fn hod_cumulative_matches_indicator_sums() {
        let c = ctx(2015, 1, 5, 24);
        let rows: Vec<usize> = (0..24).collect();
        let cum = hod_dummies(&c, &rows, true);
        assert_eq!(cum.width(), 22);
        assert_eq!(cum.names.first().unwrap(), "HoDcum_2");
        assert_eq!(cum.names.last().unwrap(), "HoDcum_23");
        // Oracle: HoDcum_i(t) = sum_{j >= i} HoD_j(t) over the full (24)
        // indicator set.
        for t in 0..24 {
            for (c_idx, name) in cum.names.iter().enumerate() {
                let i: usize = name.trim_start_matches("HoDcum_").parse().unwrap();
                let oracle: f64 = (i..=24).map(|j| if t == j - 1 { 1.0 } else { 0.0 }).sum();
                assert_eq!(cum.columns[c_idx][t], oracle);
            }
        }
        let expected: Vec<String> = (2..=6).map(|i| format!("HoDcum_{i}")).collect();
        assert_eq!(ones(&cum, 5), expected);
        // monotone within the day
        for t in 0..24 {
            let r = row(&cum, t);
            assert!(r.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn how_partition() {
        // 2015-01-05 is a Monday.
        let c = ctx(2015, 1, 5, 336);
        let rows: Vec<usize> = (0..336).collect();
        let how = how_dummies(&c, &rows);
        assert_eq!(how.width(), 167);
        assert!(row(&how, 0).iter().all(|&v| v == 0.0));
        assert_eq!(ones(&how, 1), vec!["HoW_2"]);
        for t in 0..336 {
            let base = if c.hour_of_week(t) == 0 { 1.0 } else { 0.0 };
            assert_eq!(row(&how, t).iter().sum::<f64>() + base, 1.0);
        }
    }

    #[test]
    fn holiday_blocks() {
        // 2015-12-24 (ordinary day), 25th and 26th are fixed-date holidays.
        let c = ctx(2015, 12, 24, 72);
        let rows: Vec<usize> = (0..72).collect();
        let hol = holiday_dummies(&c, &rows, true);
        assert_eq!(hol.width(), 11 + 23 + 23);
        assert!(row(&hol, 7).iter().all(|&v| v == 0.0));
        let mut expected = vec!["HD_10".to_string()];
        expected.extend((2..=8).map(|i| format!("FDHcum_{i}")));
        assert_eq!(ones(&hol, 24 + 7), expected);
    }

    #[test]
    fn fixed_weekday_holiday_base_hour() {
        // Easter Monday 2015-04-06.
        let c = ctx(2015, 4, 6, 24);
        let rows: Vec<usize> = (0..24).collect();
        let hol = holiday_dummies(&c, &rows, false);
        assert_eq!(ones(&hol, 0), vec!["HD_3"]);
        assert_eq!(ones(&hol, 3), vec!["HD_3", "FWH_4"]);
    }

    #[test]
    fn spline_block_widths() {
        let c = ctx(2015, 1, 1, 100);
        let rows: Vec<usize> = (0..100).collect();
        let basis = PeriodicBasis::new(Default::default()).unwrap();
        let cum = bspline_basis(&c, &rows, &basis, true);
        assert_eq!(cum.names, vec!["Bcum_1", "Bcum_2", "Bcum_3"]);
        let plain = bspline_basis(&c, &rows, &basis, false);
        assert_eq!(plain.names, vec!["B_1", "B_2", "B_3"]);
        for r in 0..100 {
            assert!((cum.columns[2][r] - (1.0 - basis.value(3, c.position_in_year(r)))).abs() < 1e-12);
        }
    }
}
