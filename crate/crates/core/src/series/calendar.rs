use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime, Timelike, Weekday};
use serde::{Deserialize, Serialize};

use super::SeriesError;

/// Average year length in hours (365.24 days).
pub const ANNUAL_PERIOD_HOURS: f64 = 365.24 * 24.0;

const MAX_HOLIDAYS: usize = 64;

/// Holidays either recur on a fixed weekday (Easter-relative or n-th
/// weekday of a month) or on a fixed calendar date.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HolidayClass {
    FixedWeekday,
    FixedDate,
}

impl FromStr for HolidayClass {
    type Err = SeriesError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fixed_weekday" | "fwh" => Ok(Self::FixedWeekday),
            "fixed_date" | "fdh" => Ok(Self::FixedDate),
            other => Err(SeriesError::InvalidCalendar(format!(
                "unknown holiday class '{other}'"
            ))),
        }
    }
}

/// Date rule of a holiday.
///
/// Textual forms: `MM-DD` (fixed date), `easter`, `easter+N`, `easter-N`
/// (days relative to Easter Sunday), and `<weekday>+<n>@MM` /
/// `<weekday>-<n>@MM` for the n-th (or n-th last) weekday of a month,
/// e.g. `mon+1@09` or `mon-1@05`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum HolidayRule {
    FixedDate { month: u32, day: u32 },
    Easter { offset: i32 },
    NthWeekday { weekday: Weekday, ordinal: i32, month: u32 },
}

impl HolidayRule {
    pub fn date_in_year(&self, year: i32) -> Option<NaiveDate> {
        match *self {
            HolidayRule::FixedDate { month, day } => NaiveDate::from_ymd_opt(year, month, day),
            HolidayRule::Easter { offset } => {
                Some(easter_sunday(year) + Duration::days(offset as i64))
            }
            HolidayRule::NthWeekday {
                weekday,
                ordinal,
                month,
            } => {
                if ordinal > 0 {
                    NaiveDate::from_weekday_of_month_opt(year, month, weekday, ordinal as u8)
                } else {
                    let (ny, nm) = if month == 12 { (year + 1, 1) } else { (year, month + 1) };
                    let mut d = NaiveDate::from_ymd_opt(ny, nm, 1)?.pred_opt()?;
                    while d.weekday() != weekday {
                        d = d.pred_opt()?;
                    }
                    let back = (-ordinal - 1) as i64 * 7;
                    let d = d - Duration::days(back);
                    (d.month() == month).then_some(d)
                }
            }
        }
    }
}

impl FromStr for HolidayRule {
    type Err = SeriesError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase();
        let bad = || SeriesError::InvalidCalendar(format!("unparseable holiday rule '{s}'"));
        if let Some(rest) = s.strip_prefix("easter") {
            let offset = if rest.is_empty() {
                0
            } else {
                rest.parse::<i32>().map_err(|_| bad())?
            };
            return Ok(HolidayRule::Easter { offset });
        }
        if s.contains('@') {
            let (wd, rest) = s.split_once(['+', '-']).ok_or_else(bad)?;
            let negative = s.as_bytes()[wd.len()] == b'-';
            let weekday: Weekday = wd.parse().map_err(|_| bad())?;
            let (ord, month) = rest.split_once('@').ok_or_else(bad)?;
            let ord: i32 = ord.parse().map_err(|_| bad())?;
            let month: u32 = month.parse().map_err(|_| bad())?;
            if ord == 0 || !(1..=5).contains(&ord) || !(1..=12).contains(&month) {
                return Err(bad());
            }
            return Ok(HolidayRule::NthWeekday {
                weekday,
                ordinal: if negative { -ord } else { ord },
                month,
            });
        }
        let (m, d) = s.split_once('-').ok_or_else(bad)?;
        let month: u32 = m.parse().map_err(|_| bad())?;
        let day: u32 = d.parse().map_err(|_| bad())?;
        // 2000 is a leap year, so Feb 29 is accepted here.
        NaiveDate::from_ymd_opt(2000, month, day).ok_or_else(bad)?;
        Ok(HolidayRule::FixedDate { month, day })
    }
}

impl fmt::Display for HolidayRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            HolidayRule::FixedDate { month, day } => write!(f, "{month:02}-{day:02}"),
            HolidayRule::Easter { offset: 0 } => write!(f, "easter"),
            HolidayRule::Easter { offset } => write!(f, "easter{offset:+}"),
            HolidayRule::NthWeekday {
                weekday,
                ordinal,
                month,
            } => {
                let wd = weekday.to_string().to_ascii_lowercase();
                write!(f, "{wd}{ordinal:+}@{month:02}")
            }
        }
    }
}

impl TryFrom<String> for HolidayRule {
    type Error = SeriesError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<HolidayRule> for String {
    fn from(rule: HolidayRule) -> Self {
        rule.to_string()
    }
}

/// Gregorian Easter Sunday (anonymous Gregorian algorithm).
pub fn easter_sunday(year: i32) -> NaiveDate {
    let a = year % 19;
    let b = year / 100;
    let c = year % 100;
    let d = b / 4;
    let e = b % 4;
    let f = (b + 8) / 25;
    let g = (b - f + 1) / 3;
    let h = (19 * a + b - d - g + 15) % 30;
    let i = c / 4;
    let k = c % 4;
    let l = (32 + 2 * e + 2 * i - h - k) % 7;
    let m = (a + 11 * h + 22 * l) / 451;
    let month = (h + l - 7 * m + 114) / 31;
    let day = (h + l - 7 * m + 114) % 31 + 1;
    NaiveDate::from_ymd_opt(year, month as u32, day as u32).expect("valid easter date")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Holiday {
    pub name: String,
    pub rule: HolidayRule,
    pub class: HolidayClass,
}

/// Ordered set of public holidays. Column order of every holiday feature
/// block follows the order of this list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HolidayCalendar {
    pub holidays: Vec<Holiday>,
}

impl HolidayCalendar {
    pub fn new(holidays: Vec<Holiday>) -> Result<Self, SeriesError> {
        if holidays.len() > MAX_HOLIDAYS {
            return Err(SeriesError::InvalidCalendar(format!(
                "at most {MAX_HOLIDAYS} holidays are supported"
            )));
        }
        for (i, h) in holidays.iter().enumerate() {
            if holidays[..i].iter().any(|o| o.name == h.name) {
                return Err(SeriesError::InvalidCalendar(format!(
                    "duplicate holiday name '{}'",
                    h.name
                )));
            }
        }
        Ok(Self { holidays })
    }

    pub fn empty() -> Self {
        Self { holidays: vec![] }
    }

    /// Eleven nationwide and regional public holidays of North
    /// Rhine-Westphalia, Germany. This is an assumed default; supply a
    /// calendar file for other regions.
    pub fn german_default() -> Self {
        let fd = |name: &str, month, day| Holiday {
            name: name.to_string(),
            rule: HolidayRule::FixedDate { month, day },
            class: HolidayClass::FixedDate,
        };
        let fw = |name: &str, offset| Holiday {
            name: name.to_string(),
            rule: HolidayRule::Easter { offset },
            class: HolidayClass::FixedWeekday,
        };
        Self {
            holidays: vec![
                fd("new_year", 1, 1),
                fw("good_friday", -2),
                fw("easter_monday", 1),
                fd("labour_day", 5, 1),
                fw("ascension_day", 39),
                fw("whit_monday", 50),
                fw("corpus_christi", 60),
                fd("german_unity_day", 10, 3),
                fd("all_saints_day", 11, 1),
                fd("christmas_day", 12, 25),
                fd("boxing_day", 12, 26),
            ],
        }
    }

    /// Parses a `name,rule,class` CSV file.
    pub fn from_csv_path(path: &Path) -> Result<Self, SeriesError> {
        let file = std::fs::File::open(path)
            .map_err(|e| SeriesError::Io(format!("{}: {e}", path.display())))?;
        Self::from_csv_reader(file)
    }

    pub fn from_csv_reader<R: std::io::Read>(reader: R) -> Result<Self, SeriesError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let mut holidays = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let line = i + 2;
            let rec = rec.map_err(|e| SeriesError::UnparseableRow {
                line,
                reason: e.to_string(),
            })?;
            if rec.len() != 3 {
                return Err(SeriesError::UnparseableRow {
                    line,
                    reason: "expected columns name,rule,class".into(),
                });
            }
            holidays.push(Holiday {
                name: rec[0].to_string(),
                rule: rec[1].parse()?,
                class: rec[2].parse()?,
            });
        }
        Self::new(holidays)
    }

    /// Number of distinct holidays.
    pub fn count(&self) -> usize {
        self.holidays.len()
    }

    pub fn count_fixed_weekday(&self) -> usize {
        self.count_class(HolidayClass::FixedWeekday)
    }

    pub fn count_fixed_date(&self) -> usize {
        self.count_class(HolidayClass::FixedDate)
    }

    fn count_class(&self, class: HolidayClass) -> usize {
        self.holidays.iter().filter(|h| h.class == class).count()
    }

    /// Bit mask of the holidays falling on each date of `year`.
    fn dates_in_year(&self, year: i32, out: &mut HashMap<NaiveDate, u64>) {
        for (k, h) in self.holidays.iter().enumerate() {
            if let Some(d) = h.rule.date_in_year(year) {
                *out.entry(d).or_default() |= 1 << k;
            }
        }
    }
}

/// Day categories used by the day-type conditioned naive benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DayType {
    Monday,
    TueToThu,
    Friday,
    Saturday,
    Sunday,
    Holiday,
}

impl DayType {
    pub const ALL: [DayType; 6] = [
        DayType::Monday,
        DayType::TueToThu,
        DayType::Friday,
        DayType::Saturday,
        DayType::Sunday,
        DayType::Holiday,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Per-index calendar information for an hourly grid that starts at
/// `start`. The context may extend past the observed data so that
/// forecasts can look up future calendar features.
#[derive(Debug, Clone, PartialEq)]
pub struct CalendarContext {
    start: NaiveDateTime,
    base_year: i32,
    calendar: HolidayCalendar,
    hour_of_day: Vec<u8>,
    hour_of_week: Vec<u8>,
    holiday_mask: Vec<u64>,
    position_in_year: Vec<f64>,
}

impl CalendarContext {
    pub fn new(
        start: NaiveDateTime,
        len: usize,
        calendar: HolidayCalendar,
        base_year: i32,
    ) -> Self {
        let end = start + Duration::hours(len as i64);
        let mut dates = HashMap::new();
        for year in start.year()..=end.year() {
            calendar.dates_in_year(year, &mut dates);
        }
        let anchor = NaiveDate::from_ymd_opt(base_year, 1, 1)
            .expect("valid base year")
            .and_hms_opt(0, 0, 0)
            .expect("midnight");
        let offset = (start - anchor).num_hours();

        let mut hour_of_day = Vec::with_capacity(len);
        let mut hour_of_week = Vec::with_capacity(len);
        let mut holiday_mask = Vec::with_capacity(len);
        let mut position_in_year = Vec::with_capacity(len);
        for i in 0..len {
            let ts = start + Duration::hours(i as i64);
            let hod = ts.hour() as u8;
            let dow = ts.weekday().num_days_from_monday() as u8;
            hour_of_day.push(hod);
            hour_of_week.push(dow * 24 + hod);
            holiday_mask.push(dates.get(&ts.date()).copied().unwrap_or(0));
            let hours = (offset + i as i64) as f64;
            position_in_year.push(hours.rem_euclid(ANNUAL_PERIOD_HOURS));
        }
        Self {
            start,
            base_year,
            calendar,
            hour_of_day,
            hour_of_week,
            holiday_mask,
            position_in_year,
        }
    }

    /// Context whose annual anchor is January 1 of the start year.
    pub fn for_series(start: NaiveDateTime, len: usize, calendar: HolidayCalendar) -> Self {
        Self::new(start, len, calendar, start.year())
    }

    pub fn len(&self) -> usize {
        self.hour_of_day.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hour_of_day.is_empty()
    }

    pub fn start(&self) -> NaiveDateTime {
        self.start
    }

    pub fn base_year(&self) -> i32 {
        self.base_year
    }

    pub fn calendar(&self) -> &HolidayCalendar {
        &self.calendar
    }

    pub fn hour_of_day(&self, t: usize) -> usize {
        self.hour_of_day[t] as usize
    }

    /// Monday 00:00 is hour 0 of the week.
    pub fn hour_of_week(&self, t: usize) -> usize {
        self.hour_of_week[t] as usize
    }

    pub fn day_of_week(&self, t: usize) -> usize {
        self.hour_of_week(t) / 24
    }

    pub fn position_in_year(&self, t: usize) -> f64 {
        self.position_in_year[t]
    }

    pub fn holiday_mask(&self, t: usize) -> u64 {
        self.holiday_mask[t]
    }

    pub fn is_holiday(&self, t: usize) -> bool {
        self.holiday_mask[t] != 0
    }

    /// Whether holiday `k` (calendar order) falls on the day of `t`.
    pub fn holiday_active(&self, t: usize, k: usize) -> bool {
        self.holiday_mask[t] & (1 << k) != 0
    }

    /// Whether a holiday of `class` falls on the day of `t`.
    pub fn class_active(&self, t: usize, class: HolidayClass) -> bool {
        let mask = self.holiday_mask[t];
        mask != 0
            && self
                .calendar
                .holidays
                .iter()
                .enumerate()
                .any(|(k, h)| h.class == class && mask & (1 << k) != 0)
    }

    pub fn day_type(&self, t: usize) -> DayType {
        if self.is_holiday(t) {
            return DayType::Holiday;
        }
        match self.day_of_week(t) {
            0 => DayType::Monday,
            1..=3 => DayType::TueToThu,
            4 => DayType::Friday,
            5 => DayType::Saturday,
            _ => DayType::Sunday,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(y: i32, m: u32, d: u32, h: u32) -> NaiveDateTime {
        NaiveDate::from_ymd_opt(y, m, d)
            .unwrap()
            .and_hms_opt(h, 0, 0)
            .unwrap()
    }

    #[test]
    fn easter_dates() {
        assert_eq!(easter_sunday(2015), NaiveDate::from_ymd_opt(2015, 4, 5).unwrap());
        assert_eq!(easter_sunday(2016), NaiveDate::from_ymd_opt(2016, 3, 27).unwrap());
        assert_eq!(easter_sunday(2019), NaiveDate::from_ymd_opt(2019, 4, 21).unwrap());
        assert_eq!(easter_sunday(2024), NaiveDate::from_ymd_opt(2024, 3, 31).unwrap());
    }

    #[test]
    fn default_calendar_counts() {
        let cal = HolidayCalendar::german_default();
        assert_eq!(cal.count(), 11);
        assert_eq!(cal.count_fixed_weekday(), 5);
        assert_eq!(cal.count_fixed_date(), 6);
        assert_eq!(cal.count(), cal.count_fixed_weekday() + cal.count_fixed_date());
    }

    #[test]
    fn rule_parsing_round_trips() {
        for text in ["12-25", "easter", "easter+39", "easter-2", "mon+1@09", "mon-1@05"] {
            let rule: HolidayRule = text.parse().unwrap();
            assert_eq!(rule.to_string(), text);
        }
        assert!("13-01".parse::<HolidayRule>().is_err());
        assert!("mon+1".parse::<HolidayRule>().is_err());
        assert!("xyz".parse::<HolidayRule>().is_err());
    }

    #[test]
    fn nth_weekday_rules() {
        let labor: HolidayRule = "mon+1@09".parse().unwrap();
        assert_eq!(
            labor.date_in_year(2019),
            NaiveDate::from_ymd_opt(2019, 9, 2)
        );
        let memorial: HolidayRule = "mon-1@05".parse().unwrap();
        assert_eq!(
            memorial.date_in_year(2019),
            NaiveDate::from_ymd_opt(2019, 5, 27)
        );
    }

    #[test]
    fn calendar_csv() {
        let text = "name,rule,class\nxmas,12-25,fixed_date\nwhit,easter+50,fixed_weekday\n";
        let cal = HolidayCalendar::from_csv_reader(text.as_bytes()).unwrap();
        assert_eq!(cal.count(), 2);
        assert_eq!(cal.holidays[1].class, HolidayClass::FixedWeekday);
        let bad = "name,rule,class\nxmas,12-25,sometimes\n";
        assert!(HolidayCalendar::from_csv_reader(bad.as_bytes()).is_err());
    }

    #[test]
    fn hour_of_week_identity() {
        // 2015-01-05 is a Monday.
        let ctx = CalendarContext::for_series(ts(2015, 1, 5, 0), 400, HolidayCalendar::empty());
        for t in 0..400 {
            assert_eq!(ctx.hour_of_week(t), ctx.day_of_week(t) * 24 + ctx.hour_of_day(t));
        }
        assert_eq!(ctx.hour_of_week(0), 0);
        assert_eq!(ctx.hour_of_week(1), 1);
        assert_eq!(ctx.hour_of_week(168), 0);
    }

    #[test]
    fn position_in_year_is_periodic() {
        let ctx = CalendarContext::new(ts(2015, 1, 1, 0), 30_000, HolidayCalendar::empty(), 2015);
        assert_eq!(ctx.position_in_year(0), 0.0);
        for t in 0..30_000 {
            let p = ctx.position_in_year(t);
            assert!((0.0..ANNUAL_PERIOD_HOURS).contains(&p));
            let expected = (t as f64).rem_euclid(ANNUAL_PERIOD_HOURS);
            assert!((p - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn holidays_cover_whole_day() {
        let ctx = CalendarContext::for_series(
            ts(2015, 12, 24, 0),
            72,
            HolidayCalendar::german_default(),
        );
        assert!(!ctx.is_holiday(23));
        for t in 24..72 {
            assert!(ctx.is_holiday(t));
            assert!(ctx.class_active(t, HolidayClass::FixedDate));
            assert!(!ctx.class_active(t, HolidayClass::FixedWeekday));
            assert_eq!(ctx.day_type(t), DayType::Holiday);
        }
        assert!(ctx.holiday_active(30, 9));
        assert!(ctx.holiday_active(50, 10));
    }

    #[test]
    fn day_types() {
        let ctx = CalendarContext::for_series(ts(2015, 1, 5, 0), 168, HolidayCalendar::empty());
        let types: Vec<_> = (0..7).map(|d| ctx.day_type(d * 24 + 3)).collect();
        assert_eq!(
            types,
            vec![
                DayType::Monday,
                DayType::TueToThu,
                DayType::TueToThu,
                DayType::TueToThu,
                DayType::Friday,
                DayType::Saturday,
                DayType::Sunday
            ]
        );
    }
}
