//! Stock direction prediction with a from-scratch random forest.
//!
//! The crate is `no_std` and only needs `alloc`. It covers the algorithmic
//! half of the pipeline:
//!
//! - [`market_data`]: OHLCV bar and series types plus invariant checks.
//! - [`preprocess`]: exponential smoothing and ±1 direction labels.
//! - [`indicators`]: RSI, stochastic %K, Williams %R, MACD, PROC, OBV and
//!   the feature matrix built from them.
//! - [`separability`]: z-scoring, 2-D PCA and a convex-hull overlap test.
//! - [`forest`]: impurity measures, split search, grow-to-purity trees,
//!   bagging with random feature subspaces and out-of-bag error.
//! - [`inspect`]: Graphviz export and per-sample decision traces.
//! - [`evaluate`]: train/test splitting, confusion metrics, ROC/AUC and
//!   margin diagnostics.
//!
//! File formats, networking, parallel training and the command line live in
//! the companion `trendforest` crate.

#![no_std]

extern crate alloc;

pub mod evaluate;
pub mod forest;
pub mod indicators;
pub mod inspect;
pub mod market_data;
pub mod preprocess;
pub mod separability;

pub use forest::{Criterion, DecisionTree, Forest, ForestParams, Prediction, SubspaceMode};
pub use indicators::{
    Feature, FeatureMatrix, FeatureVector, IndicatorParams, MatrixRow, N_FEATURES,
};
pub use market_data::{OhlcvBar, OhlcvSeries};
pub use preprocess::{Direction, LabeledRow, SmoothedSeries};
