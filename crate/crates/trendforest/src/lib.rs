//! File formats, parallel training and the `trendforest` command line,
//! built on `trendforest-core`.

pub mod cli;
pub mod config;
pub mod fetch;
pub mod matrix_csv;
pub mod model_file;
pub mod ohlcv_csv;
pub mod outputs;
pub mod parallel;
pub mod pipeline;
pub mod synthetic;
