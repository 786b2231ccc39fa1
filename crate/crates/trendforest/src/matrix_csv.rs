//! Feature matrix dump: `index,rsi,stoch_k,williams_r,macd,proc,obv,label`
//! with labels written as `1` (Rise) and `-1` (Fall).

use thiserror::Error;
use trendforest_core::{Direction, Feature, FeatureMatrix, FeatureVector, MatrixRow, N_FEATURES};

#[derive(Debug, Error, PartialEq)]
pub enum MatrixCsvError {
    #[error("matrix file has no rows")]
    EmptyInput,
    #[error("header must be {expected:?}, found {found:?}")]
    BadHeader { expected: String, found: String },
    #[error("line {line}: {reason}")]
    MalformedRow { line: u64, reason: String },
}

pub fn header() -> String {
    let mut cols = vec!["index"];
    cols.extend(Feature::ALL.iter().map(|f| f.key()));
    cols.push("label");
    cols.join(",")
}

pub fn write_matrix(matrix: &FeatureMatrix) -> String {
    let mut out = header();
    out.push('\n');
    for row in &matrix.rows {
        out.push_str(&row.index.to_string());
        for v in row.features.0 {
            out.push(',');
            out.push_str(&v.to_string());
        }
        out.push(',');
        out.push_str(&row.label.sign().to_string());
        out.push('\n');
    }
    out
}

/// Parses a matrix dump. The horizon is not stored in the file, so the
/// result carries horizon 0.
pub fn parse_matrix(text: &str) -> Result<FeatureMatrix, MatrixCsvError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let found = reader
        .headers()
        .map_err(|e| MatrixCsvError::MalformedRow {
            line: 1,
            reason: e.to_string(),
        })?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if found.is_empty() {
        return Err(MatrixCsvError::EmptyInput);
    }
    if found != header() {
        return Err(MatrixCsvError::BadHeader {
            expected: header(),
            found,
        });
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| MatrixCsvError::MalformedRow {
            line: e.position().map_or(0, |p| p.line()),
            reason: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let bad = |reason: String| MatrixCsvError::MalformedRow { line, reason };
        let index = record[0]
            .parse::<usize>()
            .map_err(|_| bad(format!("bad index {:?}", &record[0])))?;
        let mut features = [0.0; N_FEATURES];
        for (i, slot) in features.iter_mut().enumerate() {
            let raw = &record[i + 1];
            *slot = raw
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| bad(format!("bad {} value {raw:?}", Feature::ALL[i].key())))?;
        }
        let raw = &record[N_FEATURES + 1];
        let label = raw
            .parse::<i64>()
            .ok()
            .and_then(Direction::from_sign)
            .ok_or_else(|| bad(format!("label must be 1 or -1, got {raw:?}")))?;
        rows.push(MatrixRow {
            index,
            features: FeatureVector(features),
            label,
        });
    }
    if rows.is_empty() {
        return Err(MatrixCsvError::EmptyInput);
    }
    Ok(FeatureMatrix { rows, horizon: 0 })
}
