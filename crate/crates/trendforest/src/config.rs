//! Run configuration files.
//!
//! One `key = value` pair per line. Lists are written `[30, 60, 90]`, string
//! values may be quoted, and `#` starts a comment. Relative paths are taken
//! from the directory holding the config file.
//!
//! ```text
//! input = "prices.csv"
//! horizons = [30, 60, 90]
//! split = shuffled
//! trees = 65
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use thiserror::Error;
use trendforest_core::evaluate::{EvalSettings, LabelSource, SplitMode};
use trendforest_core::indicators::FlatWindowPolicy;
use trendforest_core::{Criterion, ForestParams, SubspaceMode, N_FEATURES};

pub const DEFAULT_ALPHA: f64 = 0.2;
pub const DEFAULT_OUTPUT_DIR: &str = "trendforest_out";

const KEYS: &[&str] = &[
    "input",
    "symbol",
    "alpha",
    "horizon",
    "horizons",
    "label_on",
    "rsi_period",
    "stoch_period",
    "proc_window",
    "flat_window",
    "split",
    "test_fraction",
    "trees",
    "mtry",
    "criterion",
    "subspace",
    "max_depth",
    "seed",
    "output_dir",
    "write_matrix",
];

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("cannot read config {path}: {reason}")]
    Io { path: PathBuf, reason: String },
    #[error("config line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("config value for {field} out of range: {reason}")]
    Range { field: &'static str, reason: String },
    #[error("config is missing required key {0}")]
    Missing(&'static str),
}

/// A fully validated evaluation run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub symbol: String,
    pub alpha: f64,
    pub horizons: Vec<usize>,
    pub settings: EvalSettings,
    pub output_dir: PathBuf,
    /// Also dump each horizon's feature matrix.
    pub write_matrix: bool,
}

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Scalar(String),
    List(Vec<String>),
}

fn unquote(s: &str) -> &str {
    let s = s.trim();
    for q in ['"', '\''] {
        if s.len() >= 2 && s.starts_with(q) && s.ends_with(q) {
            return &s[1..s.len() - 1];
        }
    }
    s
}

/// Removes a `#` comment, ignoring `#` inside quotes.
fn strip_comment(line: &str) -> &str {
    let mut quote = None;
    for (i, c) in line.char_indices() {
        match (c, quote) {
            ('"' | '\'', None) => quote = Some(c),
            (c, Some(q)) if c == q => quote = None,
            ('#', None) => return &line[..i],
            _ => {}
        }
    }
    line
}

fn parse_entries(text: &str) -> Result<BTreeMap<String, (usize, Value)>, ConfigError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |reason: String| ConfigError::Parse { line, reason };
        let content = strip_comment(raw).trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(format!("expected `key = value`, found {content:?}")))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(err(format!("unknown key {key:?}")));
        }
        let value = value.trim();
        let value = if let Some(inner) = value.strip_prefix('[') {
            let inner = inner
                .strip_suffix(']')
                .ok_or_else(|| err("unterminated list".to_string()))?;
            let items: Vec<String> = inner
                .split(',')
                .map(|s| unquote(s).to_string())
                .filter(|s| !s.is_empty())
                .collect();
            Value::List(items)
        } else {
            let v = unquote(value);
            if v.is_empty() {
                return Err(err(format!("empty value for {key}")));
            }
            Value::Scalar(v.to_string())
        };
        if out.insert(key.to_string(), (line, value)).is_some() {
            return Err(err(format!("duplicate key {key}")));
        }
    }
    if out.contains_key("horizon") && out.contains_key("horizons") {
        let line = out["horizons"].0.max(out["horizon"].0);
        return Err(ConfigError::Parse {
            line,
            reason: "give either horizon or horizons, not both".into(),
        });
    }
    Ok(out)
}

struct Resolver {
    entries: BTreeMap<String, (usize, Value)>,
    defaults: Vec<String>,
}

impl Resolver {
    fn scalar(&self, key: &str) -> Result<Option<(usize, &str)>, ConfigError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((line, Value::Scalar(s))) => Ok(Some((*line, s))),
            Some((line, Value::List(_))) => Err(ConfigError::Parse {
                line: *line,
                reason: format!("{key} takes a single value"),
            }),
        }
    }

    /// Parses `key` with `parse`, or records `default` as applied.
    fn get<T: ToString>(
        &mut self,
        key: &'static str,
        default: T,
        parse: impl Fn(&str) -> Option<T>,
    ) -> Result<T, ConfigError> {
        match self.scalar(key)? {
            Some((line, s)) => parse(s).ok_or_else(|| ConfigError::Parse {
                line,
                reason: format!("cannot read {key} from {s:?}"),
            }),
            None => {
                self.defaults
                    .push(format!("{key} = {}", default.to_string()));
                Ok(default)
            }
        }
    }

    fn get_named<T: Copy>(
        &mut self,
        key: &'static str,
        default: T,
        name: fn(T) -> &'static str,
        from_name: fn(&str) -> Option<T>,
    ) -> Result<T, ConfigError> {
        match self.scalar(key)? {
            Some((line, s)) => from_name(s).ok_or_else(|| ConfigError::Parse {
                line,
                reason: format!("unknown {key} {s:?}"),
            }),
            None => {
                self.defaults.push(format!("{key} = {}", name(default)));
                Ok(default)
            }
        }
    }
}

fn range(field: &'static str, ok: bool, reason: impl Into<String>) -> Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(ConfigError::Range {
            field,
            reason: reason.into(),
        })
    }
}

/// Parses config text. Relative paths are resolved against `base_dir`.
/// Returns the config and a `key = value` line for every default applied.
pub fn parse_config(text: &str, base_dir: &Path) -> Result<(RunConfig, Vec<String>), ConfigError> {
    let mut r = Resolver {
        entries: parse_entries(text)?,
        defaults: Vec::new(),
    };

    let input = base_dir.join(
        r.scalar("input")?
            .map(|(_, s)| s.to_string())
            .ok_or(ConfigError::Missing("input"))?,
    );
    let stem = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let symbol = r.get("symbol", stem, |s| Some(s.to_string()))?;

    let alpha = r.get("alpha", DEFAULT_ALPHA, |s| s.parse().ok())?;
    range(
        "alpha",
        alpha > 0.0 && alpha <= 1.0,
        format!("{alpha} is not in (0, 1]"),
    )?;

    let horizons: Vec<usize> = match (r.entries.get("horizon"), r.entries.get("horizons")) {
        (None, None) => return Err(ConfigError::Missing("horizon")),
        (Some((line, v)), _) | (None, Some((line, v))) => {
            let items: Vec<&str> = match v {
                Value::Scalar(s) => vec![s.as_str()],
                Value::List(l) => l.iter().map(String::as_str).collect(),
            };
            items
                .iter()
                .map(|s| {
                    s.parse::<usize>().map_err(|_| ConfigError::Parse {
                        line: *line,
                        reason: format!("horizon {s:?} is not a whole number"),
                    })
                })
                .collect::<Result<_, _>>()?
        }
    };
    range("horizons", !horizons.is_empty(), "no horizon given")?;
    range(
        "horizons",
        horizons.iter().all(|&h| h > 0),
        "horizons must be positive",
    )?;

    let label_on = r.get_named(
        "label_on",
        LabelSource::Smoothed,
        LabelSource::name,
        LabelSource::from_name,
    )?;
    let rsi_period = r.get("rsi_period", 14usize, |s| s.parse().ok())?;
    range("rsi_period", rsi_period > 0, "must be positive")?;
    let stoch_period = r.get("stoch_period", 14usize, |s| s.parse().ok())?;
    range("stoch_period", stoch_period > 0, "must be positive")?;
    let proc_window = match r.scalar("proc_window")? {
        None => {
            r.defaults.push("proc_window = horizon".into());
            None
        }
        Some((line, s)) => Some(s.parse::<usize>().map_err(|_| ConfigError::Parse {
            line,
            reason: format!("cannot read proc_window from {s:?}"),
        })?),
    };
    range("proc_window", proc_window != Some(0), "must be positive")?;
    let flat_window = r.get_named(
        "flat_window",
        FlatWindowPolicy::Midpoint,
        FlatWindowPolicy::name,
        FlatWindowPolicy::from_name,
    )?;
    let split = r.get_named(
        "split",
        SplitMode::Chronological,
        SplitMode::name,
        SplitMode::from_name,
    )?;
    let test_fraction = r.get("test_fraction", 0.2f64, |s| s.parse().ok())?;
    range(
        "test_fraction",
        test_fraction > 0.0 && test_fraction < 1.0,
        format!("{test_fraction} is not in (0, 1)"),
    )?;

    let defaults = ForestParams::default();
    let n_trees = r.get("trees", defaults.n_trees, |s| s.parse().ok())?;
    range("trees", n_trees > 0, "need at least one tree")?;
    let m_try = r.get("mtry", defaults.m_try, |s| s.parse().ok())?;
    range(
        "mtry",
        (1..=N_FEATURES).contains(&m_try),
        format!("{m_try} is not in 1..={N_FEATURES}"),
    )?;
    let criterion = r.get_named(
        "criterion",
        defaults.criterion,
        Criterion::name,
        Criterion::from_name,
    )?;
    let subspace = r.get_named(
        "subspace",
        defaults.subspace,
        SubspaceMode::name,
        SubspaceMode::from_name,
    )?;
    let max_depth = match r.scalar("max_depth")? {
        None | Some((_, "none")) => None,
        Some((line, s)) => Some(s.parse::<usize>().map_err(|_| ConfigError::Parse {
            line,
            reason: format!("cannot read max_depth from {s:?}"),
        })?),
    };
    range(
        "max_depth",
        max_depth != Some(0),
        "must be positive or none",
    )?;
    let seed = r.get("seed", defaults.seed, |s| s.parse().ok())?;

    let output_dir = base_dir.join(r.get("output_dir", DEFAULT_OUTPUT_DIR.to_string(), |s| {
        Some(s.to_string())
    })?);
    let write_matrix = r.get("write_matrix", false, |s| s.parse().ok())?;

    let config = RunConfig {
        input,
        symbol,
        alpha,
        horizons,
        settings: EvalSettings {
            rsi_period,
            stoch_period,
            proc_window,
            flat_window,
            label_on,
            split,
            test_fraction,
            forest: ForestParams {
                n_trees,
                m_try,
                criterion,
                subspace,
                max_depth,
                seed,
            },
        },
        output_dir,
        write_matrix,
    };
    Ok((config, r.defaults))
}

pub fn load_config(path: &Path) -> Result<(RunConfig, Vec<String>), ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    let base = path.parent().unwrap_or(Path::new(""));
    parse_config(&text, base)
}
