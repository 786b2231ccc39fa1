//! Multi-threaded forest training.
//!
//! Every tree draws from its own seeded stream, so the result does not depend
//! on the thread count or scheduling: it equals [`train_rows`] bit for bit.
//!
//! [`train_rows`]: trendforest_core::forest::train_rows

use rayon::prelude::*;
use trendforest_core::forest::{grow_member, ForestError};
use trendforest_core::{Direction, FeatureMatrix, FeatureVector, Forest, ForestParams};

pub fn train_rows_parallel(
    features: &[FeatureVector],
    labels: &[Direction],
    params: &ForestParams,
) -> Result<Forest, ForestError> {
    params.validate()?;
    if features.len() != labels.len() {
        return Err(ForestError::RowCountMismatch {
            expected: features.len(),
            got: labels.len(),
        });
    }
    let rises = labels.iter().filter(|&&l| l == Direction::Rise).count();
    if rises == 0 || rises == labels.len() {
        return Err(ForestError::SingleClassData);
    }
    let trees = (0..params.n_trees)
        .into_par_iter()
        .map(|k| grow_member(features, labels, params, k))
        .collect();
    Forest::from_trees(*params, features.len(), trees)
}

pub fn train_parallel(
    matrix: &FeatureMatrix,
    params: &ForestParams,
) -> Result<Forest, ForestError> {
    train_rows_parallel(&matrix.features(), &matrix.labels(), params)
}
