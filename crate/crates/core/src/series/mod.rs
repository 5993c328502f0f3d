//! Hourly demand series, calendar context, ingestion and study bookkeeping.

mod calendar;
mod ingest;
mod plan;
mod synthetic;

pub use calendar::{
    easter_sunday, CalendarContext, DayType, Holiday, HolidayCalendar, HolidayClass, HolidayRule,
    ANNUAL_PERIOD_HOURS,
};
pub use ingest::{export_csv, ingest_csv, ingest_reader, CsvSchema};
pub use plan::{make_study_plan, RollingStudyPlan};
pub use synthetic::{
    check_ar_stationary, simulate_synthetic, ArForm, Innovation, SeasonalMean, SyntheticConfig,
};

use std::ops::Range;

use chrono::{Duration, NaiveDateTime};
use thiserror::Error;

/// Errors raised while building, ingesting or slicing series.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("time series must contain at least one observation")]
    Empty,
    #[error("timestamps are not on an hourly grid (line {line}: {timestamp})")]
    NonHourlySpacing { line: usize, timestamp: String },
    #[error("duplicate timestamp {timestamp} at line {line}")]
    DuplicateTimestamp { line: usize, timestamp: String },
    #[error("cannot parse line {line}: {reason}")]
    UnparseableRow { line: usize, reason: String },
    #[error("missing value at index {index} inside an estimation window")]
    MissingInWindow { index: usize },
    #[error("window {start}..{end} is outside the series of length {len}")]
    WindowOutOfRange { start: usize, end: usize, len: usize },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("unstable autoregressive process: {0}")]
    UnstableProcess(String),
    #[error("negative variance parameters: {0}")]
    NegativeVarianceParams(String),
    #[error("invalid holiday calendar: {0}")]
    InvalidCalendar(String),
    #[error("io error: {0}")]
    Io(String),
}

/// Hourly demand observations on a gap-free grid. Missing hours are kept
/// as explicit `None` entries so that index arithmetic stays exact.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    start: NaiveDateTime,
    values: Vec<Option<f64>>,
}

impl TimeSeries {
    pub fn new(start: NaiveDateTime, values: Vec<Option<f64>>) -> Result<Self, SeriesError> {
        if values.is_empty() {
            return Err(SeriesError::Empty);
        }
        Ok(Self { start, values })
    }

    /// Builds a fully observed series.
    pub fn from_values(start: NaiveDateTime, values: Vec<f64>) -> Result<Self, SeriesError> {
        Self::new(start, values.into_iter().map(Some).collect())
    }

    pub fn start(&self) -> NaiveDateTime {
        self.start
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    pub fn get(&self, index: usize) -> Option<f64> {
        self.values.get(index).copied().flatten()
    }

    pub fn timestamp(&self, index: usize) -> NaiveDateTime {
        self.start + Duration::hours(index as i64)
    }

    pub fn missing_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    /// Returns the fully observed values of `range`, rejecting windows that
    /// contain a missing marker.
    pub fn window(&self, range: Range<usize>) -> Result<Vec<f64>, SeriesError> {
        if range.end > self.len() || range.start > range.end {
            return Err(SeriesError::WindowOutOfRange {
                start: range.start,
                end: range.end,
                len: self.len(),
            });
        }
        range
            .map(|i| self.values[i].ok_or(SeriesError::MissingInWindow { index: i }))
            .collect()
    }

    /// Truncates the series to its first `len` observations.
    pub fn truncated(&self, len: usize) -> Result<Self, SeriesError> {
        Self::new(self.start, self.values[..len.min(self.len())].to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    fn start() -> NaiveDateTime {
        NaiveDate::from_ymd_opt(2015, 1, 5)
            .unwrap()
            .and_hms_opt(0, 0, 0)
            .unwrap()
    }

    #[test]
    fn empty_series_rejected() {
        assert_eq!(TimeSeries::new(start(), vec![]), Err(SeriesError::Empty));
    }

    #[test]
    fn window_rejects_missing() {
        let s = TimeSeries::new(start(), vec![Some(1.0), None, Some(3.0)]).unwrap();
        assert_eq!(s.window(0..1).unwrap(), vec![1.0]);
        assert_eq!(
            s.window(0..3),
            Err(SeriesError::MissingInWindow { index: 1 })
        );
        assert!(matches!(
            s.window(2..5),
            Err(SeriesError::WindowOutOfRange { .. })
        ));
    }

    #[test]
    fn timestamps_advance_hourly() {
        let s = TimeSeries::from_values(start(), vec![0.0; 30]).unwrap();
        assert_eq!(s.timestamp(25), start() + Duration::hours(25));
    }
}
