//! Node impurity measures and information gain.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ImpurityError {
    #[error("class proportions must be non-negative and sum to 1")]
    NotADistribution,
    #[error("a split child is empty")]
    EmptyChild,
    #[error("child counts do not add up to the parent counts")]
    CountMismatch,
}

/// Split quality measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Criterion {
    #[default]
    Gini,
    Entropy,
}

impl Criterion {
    pub fn name(self) -> &'static str {
        match self {
            Criterion::Gini => "gini",
            Criterion::Entropy => "entropy",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "gini" => Some(Criterion::Gini),
            "entropy" => Some(Criterion::Entropy),
            _ => None,
        }
    }

    /// Impurity of a node with the given per-class counts. Zero for an empty node.
    pub fn of_counts(self, counts: &[usize]) -> f64 {
        let total: usize = counts.iter().sum();
        if total == 0 {
            return 0.0;
        }
        let n = total as f64;
        match self {
            Criterion::Gini => 1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>(),
            Criterion::Entropy => -counts
                .iter()
                .filter(|&&c| c > 0)
                .map(|&c| {
                    let p = c as f64 / n;
                    p * libm::log2(p)
                })
                .sum::<f64>(),
        }
    }

    pub fn of_proportions(self, p: &[f64]) -> Result<f64, ImpurityError> {
        match self {
            Criterion::Gini => gini(p),
            Criterion::Entropy => entropy(p),
        }
    }
}

fn check_distribution(p: &[f64]) -> Result<(), ImpurityError> {
    let sum: f64 = p.iter().sum();
    if p.is_empty() || p.iter().any(|&x| x.is_nan() || x < 0.0) || (sum - 1.0).abs() > 1e-9 {
        Err(ImpurityError::NotADistribution)
    } else {
        Ok(())
    }
}

/// Gini impurity `1 - sum p_i^2`.
pub fn gini(p: &[f64]) -> Result<f64, ImpurityError> {
    check_distribution(p)?;
    Ok(1.0 - p.iter().map(|x| x * x).sum::<f64>())
}

/// Shannon entropy in bits, with `0 log 0 = 0`.
pub fn entropy(p: &[f64]) -> Result<f64, ImpurityError> {
    check_distribution(p)?;
    Ok(-p
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * libm::log2(x))
        .sum::<f64>())
}

/// Gain from a split given counts that are already known to be consistent.
/// Clamped at zero; the true value is never negative.
pub(crate) fn gain_unchecked(
    parent: &[usize],
    left: &[usize],
    right: &[usize],
    criterion: Criterion,
) -> f64 {
    let n: usize = parent.iter().sum();
    let nl: usize = left.iter().sum();
    let nr = n - nl;
    let (pl, pr) = (nl as f64 / n as f64, nr as f64 / n as f64);
    let g = criterion.of_counts(parent)
        - pl * criterion.of_counts(left)
        - pr * criterion.of_counts(right);
    g.max(0.0)
}

/// Impurity decrease `I(N) - P_L I(N_L) - P_R I(N_R)` of splitting `parent`
/// into `left` and `right` (per-class counts).
pub fn information_gain(
    parent: &[usize],
    left: &[usize],
    right: &[usize],
    criterion: Criterion,
) -> Result<f64, ImpurityError> {
    if parent.len() != left.len()
        || parent.len() != right.len()
        || parent
            .iter()
            .zip(left)
            .zip(right)
            .any(|((p, l), r)| l + r != *p)
    {
        return Err(ImpurityError::CountMismatch);
    }
    if left.iter().sum::<usize>() == 0 || right.iter().sum::<usize>() == 0 {
        return Err(ImpurityError::EmptyChild);
    }
    Ok(gain_unchecked(parent, left, right, criterion))
}
