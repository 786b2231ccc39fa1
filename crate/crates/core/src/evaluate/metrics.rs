use super::EvaluateError;
use crate::preprocess::Direction;

/// Confusion counts with `Rise` as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.tp + self.tn + self.fp + self.fn_
    }
}

pub fn confusion(
    predictions: &[Direction],
    truth: &[Direction],
) -> Result<ConfusionCounts, EvaluateError> {
    if predictions.len() != truth.len() || truth.is_empty() {
        return Err(EvaluateError::LengthMismatch);
    }
    let mut c = ConfusionCounts::default();
    for (&p, &t) in predictions.iter().zip(truth) {
        match (p, t) {
            (Direction::Rise, Direction::Rise) => c.tp += 1,
            (Direction::Fall, Direction::Fall) => c.tn += 1,
            (Direction::Rise, Direction::Fall) => c.fp += 1,
            (Direction::Fall, Direction::Rise) => c.fn_ += 1,
        }
    }
    Ok(c)
}

/// Accuracy, precision, recall and specificity. A metric whose denominator
/// is zero is `None` (undefined).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub accuracy: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub specificity: Option<f64>,
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn metrics(c: &ConfusionCounts) -> Metrics {
    Metrics {
        accuracy: ratio(c.tp + c.tn, c.total()),
        precision: ratio(c.tp, c.tp + c.fp),
        recall: ratio(c.tp, c.tp + c.fn_),
        specificity: ratio(c.tn, c.tn + c.fp),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;
    use Direction::*;

    fn dirs(s: &[i64]) -> Vec<Direction> {
        s.iter()
            .map(|&v| Direction::from_sign(v).unwrap())
            .collect()
    }

    #[test]
    fn all_correct() {
        let t = dirs(&[1, 1, -1, -1]);
        let c = confusion(&t, &t).unwrap();
        assert_eq!((c.fp, c.fn_), (0, 0));
        let c = ConfusionCounts {
            tp: 50,
            tn: 50,
            fp: 0,
            fn_: 0,
        };
        let m = metrics(&c);
        assert_eq!(
            (m.accuracy, m.precision, m.recall, m.specificity),
            (Some(1.0), Some(1.0), Some(1.0), Some(1.0))
        );
    }

    #[test]
    fn inverted_predictions() {
        let t = dirs(&[1, -1, 1, -1, -1]);
        let p: Vec<_> = t.iter().map(|d| d.opposite()).collect();
        let c = confusion(&p, &t).unwrap();
        assert_eq!((c.tp, c.tn), (0, 0));
    }

    #[test]
    fn hand_counted_example() {
        let c = confusion(&dirs(&[1, 1, -1, -1, 1, -1]), &dirs(&[1, -1, -1, 1, 1, -1])).unwrap();
        assert_eq!(
            c,
            ConfusionCounts {
                tp: 2,
                tn: 2,
                fp: 1,
                fn_: 1
            }
        );
        let m = metrics(&c);
        for v in [m.accuracy, m.precision, m.recall, m.specificity] {
            assert!((v.unwrap() - 2.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn undefined_metrics_are_none() {
        let m = metrics(&ConfusionCounts {
            tp: 0,
            tn: 4,
            fp: 0,
            fn_: 0,
        });
        assert_eq!(m.precision, None);
        assert_eq!(m.recall, None);
        assert_eq!(m.specificity, Some(1.0));
        assert_eq!(confusion(&[Rise], &[]), Err(EvaluateError::LengthMismatch));
        assert_eq!(confusion(&[], &[]), Err(EvaluateError::LengthMismatch));
    }
}
