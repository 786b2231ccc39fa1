//! Random forest: bagged grow-to-purity trees over random feature subspaces.
//!
//! Tree `k` of a forest draws everything it needs (its bootstrap bag, its
//! feature subset and any per-node subsets) from its own stream
//! [`tree_rng`]`(seed, k)`, so a forest is fully determined by the training
//! rows and [`ForestParams`], independent of the order trees are grown in.

mod bootstrap;
mod impurity;
mod oob;
mod split;
mod tree;

use alloc::vec::Vec;

use thiserror::Error;

pub use bootstrap::{bootstrap, random_subset, tree_rng, TreeRng};
pub use impurity::{entropy, gini, information_gain, Criterion, ImpurityError};
pub use oob::{oob_curve, oob_error, oob_error_prefix, OobEstimate};
pub use split::{best_split, midpoint, Split, MIN_GAIN};
pub use tree::{grow_tree, DecisionTree, GrowOptions, Node, SubspaceMode};

use crate::indicators::{FeatureMatrix, FeatureVector, N_FEATURES};
use crate::preprocess::Direction;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ForestError {
    #[error("training data must contain both Rise and Fall rows")]
    SingleClassData,
    #[error("m_try = {0} is outside 1..={N_FEATURES}")]
    BadMTry(usize),
    #[error("a forest needs at least one tree")]
    NoTrees,
    #[error("no row is out-of-bag for any tree")]
    NoOobRows,
    #[error("expected {expected} rows, got {got}")]
    RowCountMismatch { expected: usize, got: usize },
    #[error("malformed tree {0}")]
    MalformedTree(usize),
}

/// Forest hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForestParams {
    pub n_trees: usize,
    /// Size of each random feature subset.
    pub m_try: usize,
    pub criterion: Criterion,
    pub subspace: SubspaceMode,
    pub max_depth: Option<usize>,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 65,
            m_try: 3,
            criterion: Criterion::Gini,
            subspace: SubspaceMode::Tree,
            max_depth: None,
            seed: 42,
        }
    }
}

impl ForestParams {
    pub fn validate(&self) -> Result<(), ForestError> {
        if self.n_trees == 0 {
            return Err(ForestError::NoTrees);
        }
        if self.m_try == 0 || self.m_try > N_FEATURES {
            return Err(ForestError::BadMTry(self.m_try));
        }
        Ok(())
    }

    fn grow_options(&self) -> GrowOptions {
        GrowOptions {
            criterion: self.criterion,
            max_depth: self.max_depth,
            m_try: self.m_try,
            subspace: self.subspace,
        }
    }
}

/// A trained forest. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Forest {
    params: ForestParams,
    n_train: usize,
    trees: Vec<DecisionTree>,
}

/// Ensemble vote for one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    /// Majority label, ties going to `Rise`.
    pub label: Direction,
    pub rise_votes: usize,
    pub fall_votes: usize,
}

impl Prediction {
    pub fn from_votes(rise_votes: usize, fall_votes: usize) -> Self {
        Self {
            label: if rise_votes >= fall_votes {
                Direction::Rise
            } else {
                Direction::Fall
            },
            rise_votes,
            fall_votes,
        }
    }

    /// Share of trees voting `Rise`; the ROC score.
    pub fn vote_fraction(&self) -> f64 {
        self.rise_votes as f64 / (self.rise_votes + self.fall_votes) as f64
    }
}

fn check_data(features: &[FeatureVector], labels: &[Direction]) -> Result<(), ForestError> {
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
    Ok(())
}

/// Grows tree `k` of the forest described by `params`.
///
/// Parallel trainers call this per index and collect with [`Forest::from_trees`].
pub fn grow_member(
    features: &[FeatureVector],
    labels: &[Direction],
    params: &ForestParams,
    k: usize,
) -> DecisionTree {
    let mut rng = tree_rng(params.seed, k);
    let bag = bootstrap(features.len(), &mut rng);
    let feature_subset = match params.subspace {
        SubspaceMode::Tree => random_subset(params.m_try, N_FEATURES, &mut rng),
        SubspaceMode::Node => (0..N_FEATURES).collect(),
    };
    let nodes = grow_tree(
        features,
        labels,
        &bag,
        &feature_subset,
        &params.grow_options(),
        &mut rng,
    );
    DecisionTree {
        nodes,
        feature_subset,
        bag,
    }
}

/// Trains `params.n_trees` trees sequentially.
pub fn train_rows(
    features: &[FeatureVector],
    labels: &[Direction],
    params: &ForestParams,
) -> Result<Forest, ForestError> {
    params.validate()?;
    check_data(features, labels)?;
    let trees = (0..params.n_trees)
        .map(|k| grow_member(features, labels, params, k))
        .collect();
    Ok(Forest {
        params: *params,
        n_train: features.len(),
        trees,
    })
}

pub fn train(matrix: &FeatureMatrix, params: &ForestParams) -> Result<Forest, ForestError> {
    train_rows(&matrix.features(), &matrix.labels(), params)
}

impl Forest {
    /// Assembles a forest from already grown trees, checking every tree's
    /// structure and bag against `params` and `n_train`.
    pub fn from_trees(
        params: ForestParams,
        n_train: usize,
        trees: Vec<DecisionTree>,
    ) -> Result<Self, ForestError> {
        params.validate()?;
        if trees.len() != params.n_trees {
            return Err(ForestError::RowCountMismatch {
                expected: params.n_trees,
                got: trees.len(),
            });
        }
        for (k, t) in trees.iter().enumerate() {
            let subset_ok = t.feature_subset.windows(2).all(|w| w[0] < w[1])
                && t.feature_subset.iter().all(|&f| f < N_FEATURES);
            if !subset_ok
                || !t.is_well_formed(false)
                || t.bag.len() != n_train
                || t.bag.iter().any(|&i| i >= n_train)
            {
                return Err(ForestError::MalformedTree(k));
            }
        }
        Ok(Self {
            params,
            n_train,
            trees,
        })
    }

    pub fn params(&self) -> &ForestParams {
        &self.params
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    /// Number of training rows the bags index into.
    pub fn n_train(&self) -> usize {
        self.n_train
    }

    pub fn predict(&self, x: &FeatureVector) -> Prediction {
        let rise = self
            .trees
            .iter()
            .filter(|t| t.predict(x) == Direction::Rise)
            .count();
        Prediction::from_votes(rise, self.trees.len() - rise)
    }

    /// The forest made of the first `b` trees (all of them if `b` is larger).
    pub fn prefix(&self, b: usize) -> Forest {
        let b = b.clamp(1, self.trees.len());
        Forest {
            params: ForestParams {
                n_trees: b,
                ..self.params
            },
            n_train: self.n_train,
            trees: self.trees[..b].to_vec(),
        }
    }
}
