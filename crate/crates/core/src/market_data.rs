//! Daily OHLCV bars and the ordered series built from them.

use alloc::string::String;
use alloc::vec::Vec;

use chrono::NaiveDate;
use thiserror::Error;

/// One trading day.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OhlcvBar {
    pub date: NaiveDate,
    pub open: f64,
    pub high: f64,
    pub low: f64,
    pub close: f64,
    pub volume: f64,
}

impl OhlcvBar {
    /// Price and volume invariant violations of this bar alone, tagged with `index`.
    pub fn violations(&self, index: usize) -> Vec<Violation> {
        let mut out = Vec::new();
        let prices = [self.open, self.high, self.low, self.close];
        if prices.iter().any(|p| !p.is_finite() || *p <= 0.0) {
            out.push(Violation::NonPositivePrice(index));
        }
        if self.low.is_nan() || self.high.is_nan() || self.low > self.high {
            out.push(Violation::InvertedRange(index));
        } else if !(self.low <= self.open
            && self.open <= self.high
            && self.low <= self.close
            && self.close <= self.high)
        {
            out.push(Violation::PriceOutOfRange(index));
        }
        if !self.volume.is_finite() || self.volume < 0.0 {
            out.push(Violation::NegativeVolume(index));
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.violations(0).is_empty()
    }
}

/// An invariant violation found by [`validate`], carrying the bar index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    /// A price is zero, negative or not finite.
    NonPositivePrice(usize),
    /// `high < low`.
    InvertedRange(usize),
    /// Open or close falls outside `[low, high]`.
    PriceOutOfRange(usize),
    /// Volume is negative or not finite.
    NegativeVolume(usize),
    /// The date does not strictly follow the previous bar's date.
    NonIncreasingDate(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("duplicate date {0}")]
    DuplicateDate(NaiveDate),
}

/// Bars of a single symbol in strictly increasing date order.
///
/// Construction sorts the bars and rejects duplicate dates. Price invariants
/// are not enforced here; use [`validate`] to list them.
#[derive(Debug, Clone, PartialEq)]
pub struct OhlcvSeries {
    symbol: String,
    bars: Vec<OhlcvBar>,
}

impl OhlcvSeries {
    pub fn new(symbol: impl Into<String>, mut bars: Vec<OhlcvBar>) -> Result<Self, SeriesError> {
        bars.sort_by_key(|b| b.date);
        if let Some(w) = bars.windows(2).find(|w| w[0].date == w[1].date) {
            return Err(SeriesError::DuplicateDate(w[0].date));
        }
        Ok(Self {
            symbol: symbol.into(),
            bars,
        })
    }

    pub fn symbol(&self) -> &str {
        &self.symbol
    }

    pub fn bars(&self) -> &[OhlcvBar] {
        &self.bars
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    pub fn closes(&self) -> Vec<f64> {
        self.bars.iter().map(|b| b.close).collect()
    }

    /// Drop bars from index `len` onward.
    pub fn truncate(&mut self, len: usize) {
        self.bars.truncate(len);
    }
}

/// Every invariant violation in `series`, in bar order. Empty means clean.
pub fn validate(series: &OhlcvSeries) -> Vec<Violation> {
    let mut out = Vec::new();
    for (i, bar) in series.bars.iter().enumerate() {
        if i > 0 && series.bars[i - 1].date >= bar.date {
            out.push(Violation::NonIncreasingDate(i));
        }
        out.extend(bar.violations(i));
    }
    out
}
