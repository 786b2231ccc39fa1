use alloc::vec;
use alloc::vec::Vec;

use super::EvaluateError;
use crate::preprocess::Direction;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    /// Scores at or above this are called `Rise`. The first point uses +inf.
    pub threshold: f64,
    pub fpr: f64,
    pub tpr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    /// From (0, 0) to (1, 1), one step per distinct score.
    pub points: Vec<RocPoint>,
    /// Trapezoidal area under the curve.
    pub auc: f64,
}

/// ROC curve of `scores` (higher means more likely `Rise`) against `truth`.
/// Tied scores form a single step.
pub fn roc(scores: &[f64], truth: &[Direction]) -> Result<RocCurve, EvaluateError> {
    if scores.len() != truth.len() {
        return Err(EvaluateError::LengthMismatch);
    }
    let positives = truth.iter().filter(|&&t| t == Direction::Rise).count();
    let negatives = truth.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(EvaluateError::SingleClassTruth);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut points = vec![RocPoint {
        threshold: f64::INFINITY,
        fpr: 0.0,
        tpr: 0.0,
    }];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut auc = 0.0;
    let mut i = 0;
    while i < order.len() {
        let threshold = scores[order[i]];
        while i < order.len() && scores[order[i]] == threshold {
            match truth[order[i]] {
                Direction::Rise => tp += 1,
                Direction::Fall => fp += 1,
            }
            i += 1;
        }
        let p = RocPoint {
            threshold,
            fpr: fp as f64 / negatives as f64,
            tpr: tp as f64 / positives as f64,
        };
        let prev = points[points.len() - 1];
        auc += (p.fpr - prev.fpr) * (p.tpr + prev.tpr) / 2.0;
        points.push(p);
    }
    Ok(RocCurve { points, auc })
}
