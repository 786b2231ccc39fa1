use alloc::vec::Vec;

use super::EvaluateError;
use crate::forest::Forest;
use crate::indicators::FeatureVector;
use crate::preprocess::Direction;

/// Upper bound on the error rate from the margin distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChebyshevBound {
    /// `var(margin) / s^2`, defined when the strength is positive.
    Bounded(f64),
    /// Strength `s <= 0`: no bound.
    Unbounded,
}

impl ChebyshevBound {
    pub fn value(self) -> Option<f64> {
        match self {
            ChebyshevBound::Bounded(v) => Some(v),
            ChebyshevBound::Unbounded => None,
        }
    }
}

/// Ensemble margin statistics over a set of labelled samples.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginReport {
    /// Share of trees voting the true class minus share voting the other.
    pub margins: Vec<f64>,
    /// Mean margin.
    pub strength: f64,
    /// Population variance of the margins.
    pub variance: f64,
    pub chebyshev_bound: ChebyshevBound,
    /// Fraction of samples the majority vote gets wrong: negative margins,
    /// plus zero margins on `Fall` samples since vote ties go to `Rise`.
    pub empirical_error: f64,
}

pub fn margin_report(
    forest: &Forest,
    features: &[FeatureVector],
    truth: &[Direction],
) -> Result<MarginReport, EvaluateError> {
    if features.is_empty() {
        return Err(EvaluateError::EmptyTestSet);
    }
    if features.len() != truth.len() {
        return Err(EvaluateError::LengthMismatch);
    }
    let b = forest.n_trees() as f64;
    let mut errors = 0usize;
    let margins: Vec<f64> = features
        .iter()
        .zip(truth)
        .map(|(x, &y)| {
            let p = forest.predict(x);
            let (right, wrong) = match y {
                Direction::Rise => (p.rise_votes, p.fall_votes),
                Direction::Fall => (p.fall_votes, p.rise_votes),
            };
            if right < wrong || (right == wrong && y == Direction::Fall) {
                errors += 1;
            }
            (right as f64 - wrong as f64) / b
        })
        .collect();
    let n = margins.len() as f64;
    let strength = margins.iter().sum::<f64>() / n;
    let variance = margins.iter().map(|m| (m - strength).powi(2)).sum::<f64>() / n;
    let chebyshev_bound = if strength > 0.0 {
        ChebyshevBound::Bounded(variance / (strength * strength))
    } else {
        ChebyshevBound::Unbounded
    };
    Ok(MarginReport {
        margins,
        strength,
        variance,
        chebyshev_bound,
        empirical_error: errors as f64 / n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::{train_rows, ForestParams};
    use Direction::*;

    fn separable() -> (Vec<FeatureVector>, Vec<Direction>) {
        let x = (0..40)
            .map(|i| FeatureVector([if i < 20 { i as f64 } else { 100.0 + i as f64 }; 6]))
            .collect();
        let y = (0..40).map(|i| if i < 20 { Fall } else { Rise }).collect();
        (x, y)
    }

    #[test]
    fn unanimous_correct() {
        let (x, y) = separable();
        let f = train_rows(
            &x,
            &y,
            &ForestParams {
                n_trees: 9,
                m_try: 6,
                ..ForestParams::default()
            },
        )
        .unwrap();
        // Every bootstrap bag of 40 draws holds both clusters with near certainty.
        let r = margin_report(&f, &x, &y).unwrap();
        assert!(r.margins.iter().all(|&m| m == 1.0));
        assert_eq!((r.strength, r.variance, r.empirical_error), (1.0, 0.0, 0.0));
        assert_eq!(r.chebyshev_bound, ChebyshevBound::Bounded(0.0));
    }

    #[test]
    fn unanimous_wrong() {
        let (x, y) = separable();
        let f = train_rows(
            &x,
            &y,
            &ForestParams {
                n_trees: 5,
                m_try: 6,
                ..ForestParams::default()
            },
        )
        .unwrap();
        let flipped: Vec<Direction> = y.iter().map(|d| d.opposite()).collect();
        let r = margin_report(&f, &x, &flipped).unwrap();
        assert!(r.margins.iter().all(|&m| m == -1.0));
        assert_eq!(r.strength, -1.0);
        assert_eq!(r.empirical_error, 1.0);
        assert_eq!(r.chebyshev_bound, ChebyshevBound::Unbounded);
    }

    #[test]
    fn empty_and_mismatched() {
        let (x, y) = separable();
        let f = train_rows(
            &x,
            &y,
            &ForestParams {
                n_trees: 1,
                ..ForestParams::default()
            },
        )
        .unwrap();
        assert_eq!(
            margin_report(&f, &[], &[]),
            Err(EvaluateError::EmptyTestSet)
        );
        assert_eq!(
            margin_report(&f, &x, &y[..3]),
            Err(EvaluateError::LengthMismatch)
        );
    }
}
