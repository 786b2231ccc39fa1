//! The `Date,Open,High,Low,Close,Volume` price file.
//!
//! Dates are ISO-8601 (`YYYY-MM-DD`). Header names are matched
//! case-insensitively and extra columns such as `Adj Close` are ignored.
//! Rows may come in any order; the parsed series is sorted by date.

use chrono::NaiveDate;
use thiserror::Error;
use trendforest_core::market_data::SeriesError;
use trendforest_core::{OhlcvBar, OhlcvSeries};

pub const HEADER: [&str; 6] = ["Date", "Open", "High", "Low", "Close", "Volume"];

#[derive(Debug, Error, PartialEq)]
pub enum CsvError {
    #[error("input has no data rows")]
    EmptyInput,
    #[error("header is missing column {0:?}")]
    MissingColumn(&'static str),
    #[error("line {line}: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("duplicate date {0}")]
    DuplicateDate(NaiveDate),
}

fn malformed(line: u64, reason: impl Into<String>) -> CsvError {
    CsvError::MalformedRow {
        line,
        reason: reason.into(),
    }
}

pub fn parse_csv(text: &str, symbol: &str) -> Result<OhlcvSeries, CsvError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| malformed(1, e.to_string()))?
        .clone();
    if headers.is_empty() || headers.iter().all(str::is_empty) {
        return Err(CsvError::EmptyInput);
    }
    let mut columns = [0usize; 6];
    for (slot, name) in columns.iter_mut().zip(HEADER) {
        *slot = headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or(CsvError::MissingColumn(name))?;
    }

    let mut bars = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            malformed(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let field = |i: usize| -> Result<&str, CsvError> {
            match record.get(columns[i]) {
                Some(s) if !s.is_empty() => Ok(s),
                _ => Err(malformed(line, format!("missing {}", HEADER[i]))),
            }
        };
        let number = |i: usize| -> Result<f64, CsvError> {
            let raw = field(i)?;
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| malformed(line, format!("unparsable {} {raw:?}", HEADER[i])))
        };
        let date_raw = field(0)?;
        let date = NaiveDate::parse_from_str(date_raw, "%Y-%m-%d")
            .map_err(|_| malformed(line, format!("unparsable Date {date_raw:?}")))?;
        let bar = OhlcvBar {
            date,
            open: number(1)?,
            high: number(2)?,
            low: number(3)?,
            close: number(4)?,
            volume: number(5)?,
        };
        if let Some(v) = bar.violations(0).first() {
            return Err(malformed(line, format!("{v:?}").replace("(0)", "")));
        }
        bars.push(bar);
    }
    if bars.is_empty() {
        return Err(CsvError::EmptyInput);
    }
    OhlcvSeries::new(symbol, bars)
        .map_err(|SeriesError::DuplicateDate(d)| CsvError::DuplicateDate(d))
}

/// Writes `series` in the same dialect. Numbers use the shortest form that
/// parses back to the identical value.
pub fn write_csv(series: &OhlcvSeries) -> String {
    let mut out = HEADER.join(",");
    out.push('\n');
    for b in series.bars() {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            b.date.format("%Y-%m-%d"),
            b.open,
            b.high,
            b.low,
            b.close,
            b.volume
        ));
    }
    out
}
