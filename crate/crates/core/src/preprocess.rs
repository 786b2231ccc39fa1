//! Exponential smoothing and direction labelling.

use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::market_data::OhlcvSeries;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum PreprocessError {
    #[error("series is empty")]
    EmptySeries,
    #[error("smoothing factor {0} is outside (0, 1]")]
    AlphaOutOfRange(f64),
    #[error("horizon {horizon} must be positive and below the series length {len}")]
    HorizonTooLarge { horizon: usize, len: usize },
}

/// Price direction over the label horizon. `Rise` is the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Fall,
    Rise,
}

impl Direction {
    pub fn sign(self) -> i8 {
        match self {
            Direction::Rise => 1,
            Direction::Fall => -1,
        }
    }

    pub fn from_sign(sign: i64) -> Option<Self> {
        match sign {
            1 => Some(Direction::Rise),
            -1 => Some(Direction::Fall),
            _ => None,
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            Direction::Rise => Direction::Fall,
            Direction::Fall => Direction::Rise,
        }
    }

    /// Class slot used by per-class count arrays: Fall = 0, Rise = 1.
    pub fn class_index(self) -> usize {
        match self {
            Direction::Fall => 0,
            Direction::Rise => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::Rise => "Rise",
            Direction::Fall => "Fall",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// All five OHLCV channels smoothed with the same factor.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedSeries {
    pub alpha: f64,
    pub open: Vec<f64>,
    pub high: Vec<f64>,
    pub low: Vec<f64>,
    pub close: Vec<f64>,
    pub volume: Vec<f64>,
}

impl SmoothedSeries {
    pub fn len(&self) -> usize {
        self.close.len()
    }

    pub fn is_empty(&self) -> bool {
        self.close.is_empty()
    }
}

fn check_alpha(alpha: f64) -> Result<(), PreprocessError> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(PreprocessError::AlphaOutOfRange(alpha))
    }
}

/// `S_0 = Y_0`, `S_t = alpha * Y_t + (1 - alpha) * S_{t-1}`.
pub fn exp_smooth(values: &[f64], alpha: f64) -> Result<Vec<f64>, PreprocessError> {
    check_alpha(alpha)?;
    let mut out = Vec::with_capacity(values.len());
    let mut prev = match values.first() {
        Some(&v) => v,
        None => return Err(PreprocessError::EmptySeries),
    };
    out.push(prev);
    for &y in &values[1..] {
        prev = alpha * y + (1.0 - alpha) * prev;
        out.push(prev);
    }
    Ok(out)
}

pub fn smooth(series: &OhlcvSeries, alpha: f64) -> Result<SmoothedSeries, PreprocessError> {
    check_alpha(alpha)?;
    if series.is_empty() {
        return Err(PreprocessError::EmptySeries);
    }
    let channel = |f: fn(&crate::OhlcvBar) -> f64| {
        let raw: Vec<f64> = series.bars().iter().map(f).collect();
        exp_smooth(&raw, alpha)
    };
    Ok(SmoothedSeries {
        alpha,
        open: channel(|b| b.open)?,
        high: channel(|b| b.high)?,
        low: channel(|b| b.low)?,
        close: channel(|b| b.close)?,
        volume: channel(|b| b.volume)?,
    })
}

/// Direction label for bar `index`, looking `horizon` bars ahead.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabeledRow {
    pub index: usize,
    pub label: Direction,
    pub horizon: usize,
}

/// One row per index `i` with `i + horizon < closes.len()`.
///
/// A strictly higher close `horizon` bars later is `Rise`; an equal or lower
/// one is `Fall`.
pub fn label(closes: &[f64], horizon: usize) -> Result<Vec<LabeledRow>, PreprocessError> {
    if horizon == 0 || horizon >= closes.len() {
        return Err(PreprocessError::HorizonTooLarge {
            horizon,
            len: closes.len(),
        });
    }
    Ok(closes
        .iter()
        .zip(&closes[horizon..])
        .enumerate()
        .map(|(index, (&now, &later))| LabeledRow {
            index,
            label: if later > now {
                Direction::Rise
            } else {
                Direction::Fall
            },
            horizon,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market_data::tests::flat_bar;
    use alloc::vec;
    use proptest::prelude::*;

    fn labels_of(rows: &[LabeledRow]) -> Vec<i8> {
        rows.iter().map(|r| r.label.sign()).collect()
    }

    #[test]
    fn alpha_one_is_identity() {
        let bars: Vec<_> = (0..8).map(|i| flat_bar(i, 10.0 + (i * i) as f64)).collect();
        let s = OhlcvSeries::new("T", bars).unwrap();
        let sm = smooth(&s, 1.0).unwrap();
        assert_eq!(sm.close, s.closes());
        assert_eq!(sm.high, s.bars().iter().map(|b| b.high).collect::<Vec<_>>());
        assert_eq!(sm.volume, vec![1000.0; 8]);
    }

    #[test]
    fn two_point_half_alpha() {
        // S1 = 0.5 * 4 + 0.5 * 2 = 3
        assert_eq!(exp_smooth(&[2.0, 4.0], 0.5).unwrap(), vec![2.0, 3.0]);
    }

    #[test]
    fn constant_channel_is_fixed_point() {
        assert_eq!(
            exp_smooth(&[10.0, 10.0, 10.0], 0.37).unwrap(),
            vec![10.0, 10.0, 10.0]
        );
    }

    #[test]
    fn smoothing_errors() {
        assert_eq!(exp_smooth(&[], 0.5), Err(PreprocessError::EmptySeries));
        assert_eq!(
            exp_smooth(&[1.0], 0.0),
            Err(PreprocessError::AlphaOutOfRange(0.0))
        );
        assert_eq!(
            exp_smooth(&[1.0], 1.5),
            Err(PreprocessError::AlphaOutOfRange(1.5))
        );
        let empty = OhlcvSeries::new("T", vec![]).unwrap();
        assert_eq!(smooth(&empty, 0.2), Err(PreprocessError::EmptySeries));
    }

    #[test]
    fn monotone_rise_labels() {
        let rows = label(&[1.0, 2.0, 3.0, 4.0], 1).unwrap();
        assert_eq!(labels_of(&rows), vec![1, 1, 1]);
        assert_eq!(
            rows.iter().map(|r| r.index).collect::<Vec<_>>(),
            vec![0, 1, 2]
        );
    }

    #[test]
    fn negative_shift_is_fall() {
        let rows = label(&[100.0, 99.0, 98.0, 95.0], 2).unwrap();
        assert_eq!(labels_of(&rows), vec![-1, -1]);
    }

    #[test]
    fn zero_change_is_fall() {
        let rows = label(&[5.0; 10], 3).unwrap();
        assert_eq!(labels_of(&rows), vec![-1; 7]);
    }

    #[test]
    fn horizon_bounds() {
        assert!(matches!(
            label(&[1.0, 2.0], 2),
            Err(PreprocessError::HorizonTooLarge { .. })
        ));
        assert!(matches!(
            label(&[1.0, 2.0], 0),
            Err(PreprocessError::HorizonTooLarge { .. })
        ));
    }

    proptest! {
        #[test]
        fn smoothing_is_causal(values in prop::collection::vec(0.1f64..1e4, 2..60), alpha in 0.01f64..=1.0, cut in 1usize..60) {
            let full = exp_smooth(&values, alpha).unwrap();
            let t = cut.min(values.len());
            let prefix = exp_smooth(&values[..t], alpha).unwrap();
            prop_assert_eq!(&full[..t], &prefix[..]);
        }

        #[test]
        fn smoothing_stays_in_running_range(values in prop::collection::vec(0.1f64..1e4, 1..60), alpha in 0.01f64..=1.0) {
            let s = exp_smooth(&values, alpha).unwrap();
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for (y, st) in values.iter().zip(&s) {
                lo = lo.min(*y);
                hi = hi.max(*y);
                prop_assert!(*st >= lo - 1e-9 * hi && *st <= hi + 1e-9 * hi);
            }
        }

        #[test]
        fn label_count_and_scale_invariance(values in prop::collection::vec(0.1f64..1e3, 2..60), d in 1usize..10, k in 0.01f64..100.0) {
            prop_assume!(d < values.len());
            let rows = label(&values, d).unwrap();
            prop_assert_eq!(rows.len(), values.len() - d);
            let scaled: Vec<f64> = values.iter().map(|v| v * k).collect();
            let rows_scaled = label(&scaled, d).unwrap();
            // Scaling can only flip a label if rounding turns a strict rise into a tie.
            for (a, b) in rows.iter().zip(&rows_scaled) {
                let i = a.index;
                if values[i + d] != values[i] && (values[i + d] - values[i]).abs() > 1e-9 * values[i] {
                    prop_assert_eq!(a.label, b.label);
                }
            }
        }
    }
}
