//! Technical indicators over the smoothed series and the feature matrix.
//!
//! Every stream is aligned with its input: element `t` depends only on
//! bars `0..=t`, and is `None` while the trailing window is incomplete.
//! Windows are trailing and include the current bar.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

use crate::preprocess::{Direction, LabeledRow, SmoothedSeries};

pub const N_FEATURES: usize = 6;

/// Fast EMA span of the MACD line.
pub const MACD_FAST: usize = 12;
/// Slow EMA span of the MACD line.
pub const MACD_SLOW: usize = 26;
/// EMA span of the MACD signal line.
pub const MACD_SIGNAL: usize = 9;
/// Bars before the first MACD value the feature matrix accepts.
pub const MACD_WARMUP: usize = MACD_SLOW + MACD_SIGNAL;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IndicatorError {
    #[error("series of length {got} is too short, need at least {needed}")]
    SeriesTooShort { needed: usize, got: usize },
    #[error("highest high equals lowest low in the window ending at index {0}")]
    FlatWindow(usize),
    #[error("input streams have different lengths")]
    LengthMismatch,
    #[error("indicator period must be positive")]
    ZeroPeriod,
    #[error("no index survives both indicator warm-up and label truncation")]
    NoUsableRows,
}

/// What %K and %R emit when the window's high equals its low.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FlatWindowPolicy {
    /// Range midpoint: 50 for %K, -50 for %R.
    #[default]
    Midpoint,
    /// Fail with [`IndicatorError::FlatWindow`].
    Strict,
}

impl FlatWindowPolicy {
    pub fn name(self) -> &'static str {
        match self {
            FlatWindowPolicy::Midpoint => "midpoint",
            FlatWindowPolicy::Strict => "strict",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "midpoint" => Some(FlatWindowPolicy::Midpoint),
            "strict" => Some(FlatWindowPolicy::Strict),
            _ => None,
        }
    }
}

/// The six model features, in column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Feature {
    Rsi,
    StochK,
    WilliamsR,
    Macd,
    Proc,
    Obv,
}

impl Feature {
    pub const ALL: [Feature; N_FEATURES] = [
        Feature::Rsi,
        Feature::StochK,
        Feature::WilliamsR,
        Feature::Macd,
        Feature::Proc,
        Feature::Obv,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    /// Column name used in CSV headers and Graphviz labels.
    pub fn key(self) -> &'static str {
        match self {
            Feature::Rsi => "rsi",
            Feature::StochK => "stoch_k",
            Feature::WilliamsR => "williams_r",
            Feature::Macd => "macd",
            Feature::Proc => "proc",
            Feature::Obv => "obv",
        }
    }

    /// Human-readable name used in traces.
    pub fn display_name(self) -> &'static str {
        match self {
            Feature::Rsi => "RSI",
            Feature::StochK => "Stochastic Oscillator",
            Feature::WilliamsR => "Williams %R",
            Feature::Macd => "MACD",
            Feature::Proc => "Price Rate Of Change",
            Feature::Obv => "On Balance Volume",
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown feature name")]
pub struct UnknownFeature;

impl FromStr for Feature {
    type Err = UnknownFeature;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Feature::ALL
            .into_iter()
            .find(|f| f.key() == s)
            .ok_or(UnknownFeature)
    }
}

/// One row of indicator values, indexed by [`Feature`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FeatureVector(pub [f64; N_FEATURES]);

impl FeatureVector {
    pub fn get(&self, feature: Feature) -> f64 {
        self.0[feature.index()]
    }

    pub fn rsi(&self) -> f64 {
        self.get(Feature::Rsi)
    }

    pub fn stoch_k(&self) -> f64 {
        self.get(Feature::StochK)
    }

    pub fn williams_r(&self) -> f64 {
        self.get(Feature::WilliamsR)
    }

    pub fn macd(&self) -> f64 {
        self.get(Feature::Macd)
    }

    pub fn proc(&self) -> f64 {
        self.get(Feature::Proc)
    }

    pub fn obv(&self) -> f64 {
        self.get(Feature::Obv)
    }
}

impl core::ops::Index<usize> for FeatureVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixRow {
    /// Bar position in the source series.
    pub index: usize,
    pub features: FeatureVector,
    pub label: Direction,
}

/// The training table: one fully populated, labelled row per usable bar.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub rows: Vec<MatrixRow>,
    pub horizon: usize,
}

impl FeatureMatrix {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn features(&self) -> Vec<FeatureVector> {
        self.rows.iter().map(|r| r.features).collect()
    }

    pub fn labels(&self) -> Vec<Direction> {
        self.rows.iter().map(|r| r.label).collect()
    }

    pub fn has_both_classes(&self) -> bool {
        let rises = self
            .rows
            .iter()
            .filter(|r| r.label == Direction::Rise)
            .count();
        rises > 0 && rises < self.rows.len()
    }

    /// Rows at the given positions, in the order given.
    pub fn select(&self, positions: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            rows: positions.iter().map(|&p| self.rows[p]).collect(),
            horizon: self.horizon,
        }
    }
}

fn need(len: usize, needed: usize) -> Result<(), IndicatorError> {
    if len < needed {
        Err(IndicatorError::SeriesTooShort { needed, got: len })
    } else {
        Ok(())
    }
}

/// Relative strength index with plain averages of the last `period` one-bar
/// gains and losses. Defined from index `period`.
///
/// A window without losses gives 100, one without gains gives 0, and a window
/// with neither gives 50.
pub fn rsi(closes: &[f64], period: usize) -> Result<Vec<Option<f64>>, IndicatorError> {
    if period == 0 {
        return Err(IndicatorError::ZeroPeriod);
    }
    need(closes.len(), period + 1)?;
    let mut out = vec![None; closes.len()];
    for t in period..closes.len() {
        let (mut gain, mut loss) = (0.0, 0.0);
        for w in closes[t - period..=t].windows(2) {
            let change = w[1] - w[0];
            if change > 0.0 {
                gain += change;
            } else {
                loss -= change;
            }
        }
        let (avg_gain, avg_loss) = (gain / period as f64, loss / period as f64);
        out[t] = Some(if avg_loss == 0.0 && avg_gain == 0.0 {
            50.0
        } else if avg_loss == 0.0 {
            100.0
        } else {
            let rs = avg_gain / avg_loss;
            100.0 - 100.0 / (1.0 + rs)
        });
    }
    Ok(out)
}

/// Lowest low and highest high of each trailing window, from index `period - 1`.
fn extremes<'a>(
    highs: &'a [f64],
    lows: &'a [f64],
    period: usize,
) -> impl Iterator<Item = (usize, f64, f64)> + 'a {
    (period - 1..highs.len()).map(move |t| {
        let window = t + 1 - period..=t;
        let hh = highs[window.clone()]
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let ll = lows[window].iter().copied().fold(f64::INFINITY, f64::min);
        (t, ll, hh)
    })
}

fn range_oscillator(
    closes: &[f64],
    highs: &[f64],
    lows: &[f64],
    period: usize,
    policy: FlatWindowPolicy,
    value: impl Fn(f64, f64, f64) -> f64,
    midpoint: f64,
) -> Result<Vec<Option<f64>>, IndicatorError> {
    if period == 0 {
        return Err(IndicatorError::ZeroPeriod);
    }
    if highs.len() != closes.len() || lows.len() != closes.len() {
        return Err(IndicatorError::LengthMismatch);
    }
    need(closes.len(), period)?;
    let mut out = vec![None; closes.len()];
    for (t, ll, hh) in extremes(highs, lows, period) {
        out[t] = Some(if hh == ll {
            match policy {
                FlatWindowPolicy::Midpoint => midpoint,
                FlatWindowPolicy::Strict => return Err(IndicatorError::FlatWindow(t)),
            }
        } else {
            value(closes[t], ll, hh)
        });
    }
    Ok(out)
}

/// Stochastic oscillator %K = 100 (C - L) / (H - L). Defined from index `period - 1`.
pub fn stochastic_k(
    closes: &[f64],
    highs: &[f64],
    lows: &[f64],
    period: usize,
    policy: FlatWindowPolicy,
) -> Result<Vec<Option<f64>>, IndicatorError> {
    range_oscillator(
        closes,
        highs,
        lows,
        period,
        policy,
        |c, l, h| 100.0 * (c - l) / (h - l),
        50.0,
    )
}

/// Williams %R = -100 (H - C) / (H - L). Defined from index `period - 1`.
pub fn williams_r(
    closes: &[f64],
    highs: &[f64],
    lows: &[f64],
    period: usize,
    policy: FlatWindowPolicy,
) -> Result<Vec<Option<f64>>, IndicatorError> {
    range_oscillator(
        closes,
        highs,
        lows,
        period,
        policy,
        |c, l, h| -100.0 * (h - c) / (h - l),
        -50.0,
    )
}

/// Exponential moving average with multiplier `2 / (span + 1)`, seeded with
/// the first value.
pub fn ema(values: &[f64], span: usize) -> Vec<f64> {
    let k = 2.0 / (span as f64 + 1.0);
    let mut out = Vec::with_capacity(values.len());
    let mut prev = match values.first() {
        Some(&v) => v,
        None => return out,
    };
    out.push(prev);
    for &v in &values[1..] {
        prev = v * k + prev * (1.0 - k);
        out.push(prev);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct MacdLines {
    pub macd: Vec<f64>,
    pub signal: Vec<f64>,
}

/// MACD line `EMA12 - EMA26` and its `EMA9` signal line, full length.
///
/// Values before [`MACD_WARMUP`] are computed but still settling; the
/// feature matrix skips them.
pub fn macd(closes: &[f64]) -> Result<MacdLines, IndicatorError> {
    need(closes.len(), MACD_WARMUP)?;
    let fast = ema(closes, MACD_FAST);
    let slow = ema(closes, MACD_SLOW);
    let line: Vec<f64> = fast.iter().zip(&slow).map(|(f, s)| f - s).collect();
    let signal = ema(&line, MACD_SIGNAL);
    Ok(MacdLines { macd: line, signal })
}

/// Price rate of change `(C_t - C_{t-n}) / C_{t-n}`. Defined from index `n`.
pub fn proc(closes: &[f64], n: usize) -> Result<Vec<Option<f64>>, IndicatorError> {
    if n == 0 {
        return Err(IndicatorError::ZeroPeriod);
    }
    need(closes.len(), n + 1)?;
    let mut out = vec![None; closes.len()];
    for t in n..closes.len() {
        out[t] = Some((closes[t] - closes[t - n]) / closes[t - n]);
    }
    Ok(out)
}

/// On-balance volume starting from 0 at the first bar.
pub fn obv(closes: &[f64], volumes: &[f64]) -> Result<Vec<f64>, IndicatorError> {
    if closes.len() != volumes.len() {
        return Err(IndicatorError::LengthMismatch);
    }
    need(closes.len(), 1)?;
    let mut out = Vec::with_capacity(closes.len());
    let mut level = 0.0;
    out.push(level);
    for t in 1..closes.len() {
        if closes[t] > closes[t - 1] {
            level += volumes[t];
        } else if closes[t] < closes[t - 1] {
            level -= volumes[t];
        }
        out.push(level);
    }
    Ok(out)
}

/// Window lengths for the feature matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndicatorParams {
    pub rsi_period: usize,
    pub stoch_period: usize,
    pub proc_window: usize,
    pub flat_window: FlatWindowPolicy,
}

impl IndicatorParams {
    /// 14-bar RSI and stochastic windows, PROC over the label horizon.
    pub fn for_horizon(horizon: usize) -> Self {
        Self {
            rsi_period: 14,
            stoch_period: 14,
            proc_window: horizon,
            flat_window: FlatWindowPolicy::Midpoint,
        }
    }

    /// First bar index at which every indicator is defined.
    pub fn warmup(&self) -> usize {
        MACD_WARMUP
            .max(self.rsi_period)
            .max(self.stoch_period.saturating_sub(1))
            .max(self.proc_window)
    }
}

/// Joins the six indicator streams with `labels` on bar index, keeping only
/// indices past the warm-up.
pub fn build_matrix(
    smoothed: &SmoothedSeries,
    labels: &[LabeledRow],
    params: &IndicatorParams,
) -> Result<FeatureMatrix, IndicatorError> {
    if params.rsi_period == 0 || params.stoch_period == 0 || params.proc_window == 0 {
        return Err(IndicatorError::ZeroPeriod);
    }
    let warmup = params.warmup();
    let usable: Vec<&LabeledRow> = labels
        .iter()
        .filter(|r| r.index >= warmup && r.index < smoothed.len())
        .collect();
    if usable.is_empty() {
        return Err(IndicatorError::NoUsableRows);
    }
    let c = &smoothed.close;
    let rsi = rsi(c, params.rsi_period)?;
    let k = stochastic_k(
        c,
        &smoothed.high,
        &smoothed.low,
        params.stoch_period,
        params.flat_window,
    )?;
    let r = williams_r(
        c,
        &smoothed.high,
        &smoothed.low,
        params.stoch_period,
        params.flat_window,
    )?;
    let m = macd(c)?.macd;
    let p = proc(c, params.proc_window)?;
    let o = obv(c, &smoothed.volume)?;

    let mut rows = Vec::with_capacity(usable.len());
    for lr in usable {
        let t = lr.index;
        let (Some(a), Some(b), Some(w), Some(pr)) = (rsi[t], k[t], r[t], p[t]) else {
            continue;
        };
        rows.push(MatrixRow {
            index: t,
            features: FeatureVector([a, b, w, m[t], pr, o[t]]),
            label: lr.label,
        });
    }
    if rows.is_empty() {
        return Err(IndicatorError::NoUsableRows);
    }
    Ok(FeatureMatrix {
        rows,
        horizon: labels[0].horizon,
    })
}
