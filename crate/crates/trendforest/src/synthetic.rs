//! Synthetic daily price series for tests and demos.

use chrono::{Datelike, Days, NaiveDate, Weekday};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use trendforest_core::{OhlcvBar, OhlcvSeries};

/// Log-price = drift + a sine cycle + a Gaussian random walk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticParams {
    pub n_bars: usize,
    pub seed: u64,
    pub start_price: f64,
    /// Daily drift of the log price.
    pub drift: f64,
    /// Amplitude of the log-price cycle; 0 gives a plain random walk.
    pub cycle_amplitude: f64,
    /// Cycle length in bars.
    pub cycle_period: f64,
    /// Daily standard deviation of the random-walk part.
    pub volatility: f64,
}

impl SyntheticParams {
    /// A series whose direction over the next weeks is largely predictable
    /// from its recent trend.
    pub fn planted_signal(n_bars: usize, seed: u64) -> Self {
        Self {
            n_bars,
            seed,
            start_price: 100.0,
            drift: 0.0002,
            cycle_amplitude: 0.25,
            cycle_period: 250.0,
            volatility: 0.006,
        }
    }

    /// A drifting geometric random walk with stock-like daily volatility.
    pub fn random_walk(n_bars: usize, seed: u64) -> Self {
        Self {
            n_bars,
            seed,
            start_price: 30.0,
            drift: 0.0006,
            cycle_amplitude: 0.0,
            cycle_period: 1.0,
            volatility: 0.018,
        }
    }
}

fn round_to(x: f64, places: i32) -> f64 {
    let scale = 10f64.powi(places);
    (x * scale).round() / scale
}

/// Weekdays from 2000-01-03 onwards.
fn trading_days() -> impl Iterator<Item = NaiveDate> {
    let start = NaiveDate::from_ymd_opt(2000, 1, 3).expect("valid date");
    (0..)
        .map(move |i| start + Days::new(i))
        .filter(|d| !matches!(d.weekday(), Weekday::Sat | Weekday::Sun))
}

/// Generates the series. Prices are rounded to 4 decimals and volumes to
/// whole shares, so a CSV round trip reproduces it exactly.
pub fn generate(params: &SyntheticParams) -> OhlcvSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let step = Normal::new(0.0, params.volatility).expect("finite volatility");
    let unit = Normal::new(0.0, 1.0).expect("unit normal");
    let phase = std::f64::consts::TAU / params.cycle_period;

    let mut walk = 0.0;
    let mut prev_close = params.start_price;
    let mut bars = Vec::with_capacity(params.n_bars);
    for (t, date) in trading_days().take(params.n_bars).enumerate() {
        walk += params.drift + step.sample(&mut rng);
        let cycle = params.cycle_amplitude * (phase * t as f64).sin();
        let close = round_to(params.start_price * (walk + cycle).exp(), 4);
        let gap = 0.3 * params.volatility * unit.sample(&mut rng);
        let open = round_to(prev_close * gap.exp(), 4);
        let wick = |rng: &mut ChaCha8Rng| 0.5 * params.volatility * unit.sample(rng).abs();
        let high = round_to(open.max(close) * wick(&mut rng).exp(), 4).max(open.max(close));
        let low = round_to(open.min(close) * (-wick(&mut rng)).exp(), 4).min(open.min(close));
        let move_size = ((close - prev_close) / prev_close).abs() / params.volatility;
        let volume = (1.0e6 * (1.0 + move_size) * (0.25 * unit.sample(&mut rng)).exp()).round();
        bars.push(OhlcvBar {
            date,
            open,
            high,
            low,
            close,
            volume,
        });
        prev_close = close;
    }
    OhlcvSeries::new("SYNTH", bars).expect("trading days are distinct")
}

#[cfg(test)]
mod tests {
    use super::*;
    use trendforest_core::market_data::validate;

    #[test]
    fn bars_are_valid_and_reproducible() {
        for p in [
            SyntheticParams::planted_signal(600, 1),
            SyntheticParams::random_walk(600, 2),
        ] {
            let a = generate(&p);
            assert_eq!(a.len(), 600);
            assert!(validate(&a).is_empty(), "{:?}", validate(&a));
            assert_eq!(a, generate(&p));
            assert_ne!(
                a,
                generate(&SyntheticParams {
                    seed: p.seed + 1,
                    ..p
                })
            );
        }
    }

    #[test]
    fn no_weekends() {
        let s = generate(&SyntheticParams::random_walk(30, 0));
        assert!(s
            .bars()
            .iter()
            .all(|b| b.date.weekday().number_from_monday() <= 5));
        assert_eq!(
            s.bars()[0].date,
            NaiveDate::from_ymd_opt(2000, 1, 3).unwrap()
        );
    }
}
