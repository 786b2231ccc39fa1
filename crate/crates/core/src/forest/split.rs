//! Exhaustive greedy split search.

use alloc::vec::Vec;

use super::impurity::{gain_unchecked, Criterion};
use crate::indicators::FeatureVector;
use crate::preprocess::Direction;

/// Gains at or below this are treated as no improvement; it absorbs the
/// rounding noise of splits whose children mirror the parent's class mix.
pub const MIN_GAIN: f64 = 1e-12;

/// A threshold test `x[feature] <= threshold` (true goes left) and its gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    pub gain: f64,
}

impl Split {
    /// Higher gain wins; equal gains prefer the lower feature id, then the
    /// lower threshold.
    pub fn beats(&self, other: &Split) -> bool {
        self.gain > other.gain
            || (self.gain == other.gain
                && (self.feature, self.threshold) < (other.feature, other.threshold))
    }
}

/// A threshold strictly below `hi` that keeps `lo` on the left.
pub fn midpoint(lo: f64, hi: f64) -> f64 {
    let mid = lo + (hi - lo) / 2.0;
    if mid >= hi {
        lo
    } else {
        mid
    }
}

pub(crate) fn class_counts(labels: &[Direction], rows: &[usize]) -> [usize; 2] {
    let mut counts = [0usize; 2];
    for &r in rows {
        counts[labels[r].class_index()] += 1;
    }
    counts
}

/// Best split of `rows` over the features in `subset`, including zero-gain
/// splits. `None` only when every candidate feature is constant on `rows`.
pub(crate) fn best_candidate(
    features: &[FeatureVector],
    labels: &[Direction],
    rows: &[usize],
    subset: &[usize],
    criterion: Criterion,
    scratch: &mut Vec<(f64, usize)>,
) -> Option<Split> {
    let parent = class_counts(labels, rows);
    let mut best: Option<Split> = None;
    for &feature in subset {
        scratch.clear();
        scratch.extend(
            rows.iter()
                .map(|&r| (features[r].0[feature], labels[r].class_index())),
        );
        scratch.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut left = [0usize; 2];
        for i in 0..scratch.len().saturating_sub(1) {
            left[scratch[i].1] += 1;
            let (v, next) = (scratch[i].0, scratch[i + 1].0);
            if v == next {
                continue;
            }
            let right = [parent[0] - left[0], parent[1] - left[1]];
            let candidate = Split {
                feature,
                threshold: midpoint(v, next),
                gain: gain_unchecked(&parent, &left, &right, criterion),
            };
            if best.is_none_or(|b| candidate.beats(&b)) {
                best = Some(candidate);
            }
        }
    }
    best
}

/// The split with the largest positive gain over the features in `subset`,
/// scanning every midpoint between consecutive distinct values.
///
/// Returns `None` when no split improves impurity.
pub fn best_split(
    features: &[FeatureVector],
    labels: &[Direction],
    subset: &[usize],
    criterion: Criterion,
) -> Option<Split> {
    let rows: Vec<usize> = (0..features.len().min(labels.len())).collect();
    best_candidate(features, labels, &rows, subset, criterion, &mut Vec::new())
        .filter(|s| s.gain > MIN_GAIN)
}
