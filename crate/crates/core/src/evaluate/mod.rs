//! Held-out evaluation: splitting, confusion metrics, ROC and margins.

mod margin;
mod metrics;
mod roc;
mod split;

use alloc::vec::Vec;

use thiserror::Error;

pub use margin::{margin_report, ChebyshevBound, MarginReport};
pub use metrics::{confusion, metrics, ConfusionCounts, Metrics};
pub use roc::{roc, RocCurve, RocPoint};
pub use split::{split_train_test, SplitMode};

use crate::forest::{self, oob_error, Forest, ForestError, ForestParams, OobEstimate};
use crate::indicators::{build_matrix, FeatureMatrix, IndicatorError, IndicatorParams};
use crate::preprocess::{label, Direction, PreprocessError, SmoothedSeries};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvaluateError {
    #[error("degenerate train/test split: {0}")]
    DegenerateSplit(&'static str),
    #[error("prediction and truth lists differ in length or are empty")]
    LengthMismatch,
    #[error("truth labels contain a single class")]
    SingleClassTruth,
    #[error("test set is empty")]
    EmptyTestSet,
    #[error(transparent)]
    Preprocess(#[from] PreprocessError),
    #[error(transparent)]
    Indicator(#[from] IndicatorError),
    #[error(transparent)]
    Forest(#[from] ForestError),
}

/// Which closes the direction labels are computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LabelSource {
    #[default]
    Smoothed,
    Raw,
}

impl LabelSource {
    pub fn name(self) -> &'static str {
        match self {
            LabelSource::Smoothed => "smoothed",
            LabelSource::Raw => "raw",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "smoothed" => Some(LabelSource::Smoothed),
            "raw" => Some(LabelSource::Raw),
            _ => None,
        }
    }
}

/// Everything one horizon's evaluation needs besides the data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalSettings {
    pub rsi_period: usize,
    pub stoch_period: usize,
    /// PROC window; the horizon when `None`.
    pub proc_window: Option<usize>,
    pub flat_window: crate::indicators::FlatWindowPolicy,
    pub label_on: LabelSource,
    pub split: SplitMode,
    pub test_fraction: f64,
    pub forest: ForestParams,
}

impl Default for EvalSettings {
    fn default() -> Self {
        Self {
            rsi_period: 14,
            stoch_period: 14,
            proc_window: None,
            flat_window: Default::default(),
            label_on: LabelSource::Smoothed,
            split: SplitMode::Chronological,
            test_fraction: 0.2,
            forest: ForestParams::default(),
        }
    }
}

impl EvalSettings {
    pub fn indicator_params(&self, horizon: usize) -> IndicatorParams {
        IndicatorParams {
            rsi_period: self.rsi_period,
            stoch_period: self.stoch_period,
            proc_window: self.proc_window.unwrap_or(horizon),
            flat_window: self.flat_window,
        }
    }
}

/// Held-out and out-of-bag results for one horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct HorizonReport {
    pub horizon: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub confusion: ConfusionCounts,
    pub metrics: Metrics,
    /// `None` when the test side holds a single class.
    pub roc: Option<RocCurve>,
    pub oob: OobEstimate,
    pub margin: MarginReport,
}

/// A finished horizon run: the report plus the artifacts behind it.
#[derive(Debug, Clone)]
pub struct HorizonRun {
    pub report: HorizonReport,
    pub forest: Forest,
    pub train: FeatureMatrix,
    pub test: FeatureMatrix,
}

/// Feature matrix for `horizon`, labelling on smoothed or raw closes.
pub fn horizon_matrix(
    smoothed: &SmoothedSeries,
    raw_closes: &[f64],
    horizon: usize,
    settings: &EvalSettings,
) -> Result<FeatureMatrix, EvaluateError> {
    let closes = match settings.label_on {
        LabelSource::Smoothed => &smoothed.close[..],
        LabelSource::Raw => raw_closes,
    };
    let labels = label(closes, horizon)?;
    Ok(build_matrix(
        smoothed,
        &labels,
        &settings.indicator_params(horizon),
    )?)
}

/// Scores a trained forest on held-out rows.
pub fn score(
    forest: &Forest,
    test: &FeatureMatrix,
) -> Result<(ConfusionCounts, Metrics, Option<RocCurve>, MarginReport), EvaluateError> {
    let x = test.features();
    let truth = test.labels();
    let votes: Vec<forest::Prediction> = x.iter().map(|v| forest.predict(v)).collect();
    let predicted: Vec<Direction> = votes.iter().map(|p| p.label).collect();
    let scores: Vec<f64> = votes.iter().map(|p| p.vote_fraction()).collect();
    let c = confusion(&predicted, &truth)?;
    let roc = match roc(&scores, &truth) {
        Ok(r) => Some(r),
        Err(EvaluateError::SingleClassTruth) => None,
        Err(e) => return Err(e),
    };
    let margin = margin_report(forest, &x, &truth)?;
    Ok((c, metrics(&c), roc, margin))
}

/// Builds the matrix, splits, trains on the training side with OOB, and
/// scores the test side.
pub fn evaluate_horizon(
    smoothed: &SmoothedSeries,
    raw_closes: &[f64],
    horizon: usize,
    settings: &EvalSettings,
) -> Result<HorizonRun, EvaluateError> {
    let matrix = horizon_matrix(smoothed, raw_closes, horizon, settings)?;
    let (train, test) = split_train_test(
        &matrix,
        settings.split,
        settings.test_fraction,
        settings.forest.seed,
    )?;
    let forest = forest::train(&train, &settings.forest)?;
    evaluate_trained(forest, train, test, horizon)
}

/// Same as [`evaluate_horizon`] once the forest has been trained on `train`.
pub fn evaluate_trained(
    forest: Forest,
    train: FeatureMatrix,
    test: FeatureMatrix,
    horizon: usize,
) -> Result<HorizonRun, EvaluateError> {
    let oob = oob_error(&forest, &train.features(), &train.labels())?;
    let (confusion, metrics, roc, margin) = score(&forest, &test)?;
    Ok(HorizonRun {
        report: HorizonReport {
            horizon,
            n_train: train.len(),
            n_test: test.len(),
            confusion,
            metrics,
            roc,
            oob,
            margin,
        },
        forest,
        train,
        test,
    })
}
