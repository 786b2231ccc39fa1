use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::EvaluateError;
use crate::indicators::FeatureMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SplitMode {
    /// Test rows are the most recent ones.
    #[default]
    Chronological,
    /// Test rows are a seeded uniform random subset.
    Shuffled,
}

impl SplitMode {
    pub fn name(self) -> &'static str {
        match self {
            SplitMode::Chronological => "chronological",
            SplitMode::Shuffled => "shuffled",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "chronological" => Some(SplitMode::Chronological),
            "shuffled" => Some(SplitMode::Shuffled),
            _ => None,
        }
    }
}

/// Splits off `round(n * test_fraction)` test rows. Both halves keep the
/// matrix's row order.
pub fn split_train_test(
    matrix: &FeatureMatrix,
    mode: SplitMode,
    test_fraction: f64,
    seed: u64,
) -> Result<(FeatureMatrix, FeatureMatrix), EvaluateError> {
    let n = matrix.len();
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(EvaluateError::DegenerateSplit(
            "test fraction must lie in (0, 1)",
        ));
    }
    let n_test = libm::round(n as f64 * test_fraction) as usize;
    if n_test == 0 || n_test >= n {
        return Err(EvaluateError::DegenerateSplit(
            "train or test side would be empty",
        ));
    }
    let mut test_mask = alloc::vec![false; n];
    match mode {
        SplitMode::Chronological => test_mask[n - n_test..].fill(true),
        SplitMode::Shuffled => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut order: Vec<usize> = (0..n).collect();
            for i in 0..n_test {
                let j = rng.random_range(i as u64..n as u64) as usize;
                order.swap(i, j);
            }
            for &i in &order[..n_test] {
                test_mask[i] = true;
            }
        }
    }
    let (test_idx, train_idx): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| test_mask[i]);
    let train = matrix.select(&train_idx);
    if !train.has_both_classes() {
        return Err(EvaluateError::DegenerateSplit(
            "training side lacks one class",
        ));
    }
    Ok((train, matrix.select(&test_idx)))
}
