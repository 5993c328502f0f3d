use std::io::{Read, Write};
use std::path::Path;

use chrono::{DateTime, FixedOffset, NaiveDateTime, Timelike};

use super::{SeriesError, TimeSeries};

/// Column mapping for demand CSV files.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvSchema {
    pub timestamp_column: String,
    pub demand_column: String,
    /// Offset (hours east of UTC) that timezone-aware timestamps are
    /// normalized to. Naive timestamps are taken as-is.
    pub fixed_offset_hours: i32,
}

impl Default for CsvSchema {
    fn default() -> Self {
        Self {
            timestamp_column: "timestamp".into(),
            demand_column: "demand".into(),
            fixed_offset_hours: 0,
        }
    }
}

const NAIVE_FORMATS: [&str; 4] = [
    "%Y-%m-%dT%H:%M:%S",
    "%Y-%m-%d %H:%M:%S",
    "%Y-%m-%dT%H:%M",
    "%Y-%m-%d %H:%M",
];

fn parse_timestamp(text: &str, offset: FixedOffset) -> Option<NaiveDateTime> {
    let text = text.trim();
    if let Ok(dt) = DateTime::parse_from_rfc3339(text) {
        return Some(dt.with_timezone(&offset).naive_local());
    }
    for fmt in ["%Y-%m-%dT%H:%M%:z", "%Y-%m-%d %H:%M:%S%:z"] {
        if let Ok(dt) = DateTime::parse_from_str(text, fmt) {
            return Some(dt.with_timezone(&offset).naive_local());
        }
    }
    NAIVE_FORMATS
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(text, f).ok())
        // hour precision: "YYYY-MM-DDTHH"
        .or_else(|| NaiveDateTime::parse_from_str(&format!("{text}:00"), "%Y-%m-%dT%H:%M").ok())
}

fn parse_demand(text: &str) -> Result<Option<f64>, String> {
    let text = text.trim();
    if text.is_empty() || text.eq_ignore_ascii_case("na") || text.eq_ignore_ascii_case("nan") {
        return Ok(None);
    }
    let v: f64 = text.parse().map_err(|_| format!("bad demand value '{text}'"))?;
    if !v.is_finite() {
        return Err(format!("non-finite demand value '{text}'"));
    }
    Ok(Some(v))
}

pub fn ingest_csv(path: &Path, schema: &CsvSchema) -> Result<TimeSeries, SeriesError> {
    let file =
        std::fs::File::open(path).map_err(|e| SeriesError::Io(format!("{}: {e}", path.display())))?;
    ingest_reader(file, schema)
}

/// Reads an hourly demand CSV. Gaps of whole hours become explicit
/// missing values; sub-hourly or unordered timestamps are rejected.
pub fn ingest_reader<R: Read>(reader: R, schema: &CsvSchema) -> Result<TimeSeries, SeriesError> {
    let offset = FixedOffset::east_opt(schema.fixed_offset_hours * 3600).ok_or_else(|| {
        SeriesError::UnparseableRow {
            line: 0,
            reason: format!("invalid fixed offset {}", schema.fixed_offset_hours),
        }
    })?;
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| SeriesError::UnparseableRow {
            line: 1,
            reason: e.to_string(),
        })?
        .clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| SeriesError::UnparseableRow {
                line: 1,
                reason: format!("missing column '{name}'"),
            })
    };
    let ts_col = find(&schema.timestamp_column)?;
    let val_col = find(&schema.demand_column)?;

    let mut start: Option<NaiveDateTime> = None;
    let mut prev: Option<NaiveDateTime> = None;
    let mut values: Vec<Option<f64>> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| SeriesError::UnparseableRow {
            line,
            reason: e.to_string(),
        })?;
        let raw_ts = rec.get(ts_col).unwrap_or("");
        let ts = parse_timestamp(raw_ts, offset).ok_or_else(|| SeriesError::UnparseableRow {
            line,
            reason: format!("bad timestamp '{raw_ts}'"),
        })?;
        let value = parse_demand(rec.get(val_col).unwrap_or(""))
            .map_err(|reason| SeriesError::UnparseableRow { line, reason })?;
        if ts.minute() != 0 || ts.second() != 0 || ts.nanosecond() != 0 {
            return Err(SeriesError::NonHourlySpacing {
                line,
                timestamp: raw_ts.to_string(),
            });
        }
        match prev {
            None => {
                start = Some(ts);
                values.push(value);
            }
            Some(p) => {
                let step = (ts - p).num_hours();
                if ts == p {
                    return Err(SeriesError::DuplicateTimestamp {
                        line,
                        timestamp: raw_ts.to_string(),
                    });
                }
                if step < 1 {
                    return Err(SeriesError::NonHourlySpacing {
                        line,
                        timestamp: raw_ts.to_string(),
                    });
                }
                values.extend(std::iter::repeat_n(None, (step - 1) as usize));
                values.push(value);
            }
        }
        prev = Some(ts);
    }
    let start = start.ok_or(SeriesError::Empty)?;
    TimeSeries::new(start, values)
}

/// Writes `timestamp,demand`; missing values become empty fields.
pub fn export_csv<W: Write>(series: &TimeSeries, writer: W) -> Result<(), SeriesError> {
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| SeriesError::Io(e.to_string());
    w.write_record(["timestamp", "demand"]).map_err(io)?;
    for (i, v) in series.values().iter().enumerate() {
        let ts = series.timestamp(i).format("%Y-%m-%dT%H:%M:%S").to_string();
        let val = v.map(|x| x.to_string()).unwrap_or_default();
        w.write_record([ts, val]).map_err(io)?;
    }
    w.flush().map_err(|e| SeriesError::Io(e.to_string()))
}
