//! The end-to-end `evaluate` run: ingest, smooth, then per horizon build
//! features, split, train, score and write the artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;
use trendforest_core::evaluate::{
    evaluate_trained, horizon_matrix, split_train_test, EvaluateError, HorizonReport,
};
use trendforest_core::inspect::export_dot;
use trendforest_core::preprocess::{smooth, PreprocessError};
use trendforest_core::OhlcvSeries;

use crate::config::RunConfig;
use crate::matrix_csv::write_matrix;
use crate::model_file::write_model;
use crate::ohlcv_csv::{parse_csv, CsvError};
use crate::outputs::{report_csv, roc_csv, summary_table};
use crate::parallel::train_parallel;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{path}: {reason}")]
    Io { path: PathBuf, reason: String },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: CsvError },
    #[error(transparent)]
    Preprocess(#[from] PreprocessError),
    #[error("horizon {horizon}: {source}")]
    Evaluate {
        horizon: usize,
        source: EvaluateError,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |e| PipelineError::Io {
        path: path.to_path_buf(),
        reason: e.to_string(),
    }
}

pub fn read_series(path: &Path, symbol: &str) -> Result<OhlcvSeries, PipelineError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_csv(&text, symbol).map_err(|source| PipelineError::Csv {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), PipelineError> {
    fs::write(path, contents).map_err(io_err(path))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub symbol: String,
    pub horizons: Vec<HorizonReport>,
    /// Every file written, in write order.
    pub files: Vec<PathBuf>,
}

impl EvaluationReport {
    pub fn table(&self) -> String {
        summary_table(&self.horizons)
    }
}

/// Runs every configured horizon and writes into `config.output_dir`:
/// `report.csv`, and per horizon `h` the files `roc_h.csv` (when the test
/// side holds both classes), `model_h.forest`, `dots_h/tree_k.dot` and,
/// if asked for, `matrix_h.csv`.
pub fn evaluate_pipeline(config: &RunConfig) -> Result<EvaluationReport, PipelineError> {
    let series = read_series(&config.input, &config.symbol)?;
    let smoothed = smooth(&series, config.alpha)?;
    let raw_closes = series.closes();

    let out = &config.output_dir;
    fs::create_dir_all(out).map_err(io_err(out))?;
    let mut files = Vec::new();
    let mut write = |path: PathBuf, contents: &str| -> Result<(), PipelineError> {
        write_file(&path, contents)?;
        files.push(path);
        Ok(())
    };

    let mut reports = Vec::with_capacity(config.horizons.len());
    for &h in &config.horizons {
        let at = |source| PipelineError::Evaluate { horizon: h, source };
        let settings = &config.settings;
        let matrix = horizon_matrix(&smoothed, &raw_closes, h, settings).map_err(at)?;
        if config.write_matrix {
            write(out.join(format!("matrix_{h}.csv")), &write_matrix(&matrix))?;
        }
        let (train, test) = split_train_test(
            &matrix,
            settings.split,
            settings.test_fraction,
            settings.forest.seed,
        )
        .map_err(at)?;
        let forest = train_parallel(&train, &settings.forest).map_err(|e| at(e.into()))?;
        let run = evaluate_trained(forest, train, test, h).map_err(at)?;

        if let Some(curve) = &run.report.roc {
            write(out.join(format!("roc_{h}.csv")), &roc_csv(curve))?;
        }
        write(
            out.join(format!("model_{h}.forest")),
            &write_model(&run.forest),
        )?;
        let dots = out.join(format!("dots_{h}"));
        fs::create_dir_all(&dots).map_err(io_err(&dots))?;
        for (k, tree) in run.forest.trees().iter().enumerate() {
            write(dots.join(format!("tree_{k}.dot")), &export_dot(tree, k))?;
        }
        reports.push(run.report);
    }
    write(out.join("report.csv"), &report_csv(&reports))?;
    Ok(EvaluationReport {
        symbol: config.symbol.clone(),
        horizons: reports,
        files,
    })
}
