//! Argument parsing and subcommand dispatch.
//!
//! Exit status is 0 on success, 1 on a usage error and 2 when the data or a
//! model cannot be processed. Diagnostics go to stderr; results go to files
//! or stdout.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use trendforest_core::forest::{oob_curve, oob_error, oob_error_prefix};
use trendforest_core::indicators::{build_matrix, macd, FlatWindowPolicy, IndicatorParams};
use trendforest_core::inspect::{export_dot, trace};
use trendforest_core::market_data::validate;
use trendforest_core::preprocess::{label, smooth};
use trendforest_core::separability::separability_report;
use trendforest_core::{
    Criterion, Feature, FeatureMatrix, FeatureVector, Forest, ForestParams, SubspaceMode,
    N_FEATURES,
};

use crate::config::load_config;
use crate::fetch::fetch_remote;
use crate::matrix_csv::{parse_matrix, write_matrix};
use crate::model_file::{parse_model, write_model};
use crate::ohlcv_csv::{parse_csv, write_csv};
use crate::outputs::{hulls_csv, points_csv};
use crate::parallel::train_parallel;
use crate::pipeline::{evaluate_pipeline, read_series, write_file};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "trendforest",
    version,
    about = "Random-forest stock trend classification"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a price CSV (local or downloaded) and write it normalized.
    Ingest(IngestArgs),
    /// Smooth prices, label them and write the feature matrix.
    Features(FeaturesArgs),
    /// Project a feature matrix to 2-D and test whether the classes separate.
    Separability(SeparabilityArgs),
    /// Train a forest on a feature matrix.
    Train(TrainArgs),
    /// Predict the rows of a feature matrix.
    Predict(PredictArgs),
    /// Show every tree's decision path for one sample.
    Trace(TraceArgs),
    /// Write each tree of a model as a Graphviz file.
    ExportDot(ExportDotArgs),
    /// Out-of-bag error of a model, optionally as a curve over tree counts.
    Oob(OobArgs),
    /// Run the full evaluation described by a config file.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Local price CSV.
    #[arg(long, conflicts_with = "url", required_unless_present = "url")]
    pub input: Option<PathBuf>,
    /// Download the CSV from this URL instead.
    #[arg(long)]
    pub url: Option<String>,
    #[arg(long, default_value = "")]
    pub symbol: String,
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LabelOn {
    Smoothed,
    Raw,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FlatWindow {
    Midpoint,
    Strict,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CriterionArg {
    Gini,
    Entropy,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SubspaceArg {
    Tree,
    Node,
}

#[derive(Debug, Args)]
pub struct FeaturesArgs {
    /// Price CSV.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 0.2)]
    pub alpha: f64,
    /// Label horizon in trading days.
    #[arg(long)]
    pub horizon: usize,
    #[arg(long, value_enum, default_value = "smoothed")]
    pub label_on: LabelOn,
    #[arg(long, default_value_t = 14)]
    pub rsi_period: usize,
    #[arg(long, default_value_t = 14)]
    pub stoch_period: usize,
    /// PROC window; defaults to the horizon.
    #[arg(long)]
    pub proc_window: Option<usize>,
    #[arg(long, value_enum, default_value = "midpoint")]
    pub flat_window: FlatWindow,
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the MACD line and its signal line as `index,macd,signal`.
    #[arg(long)]
    pub signal_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SeparabilityArgs {
    /// Feature matrix CSV.
    #[arg(long)]
    pub input: PathBuf,
    /// Projected points, `x,y,label`.
    #[arg(long)]
    pub out: PathBuf,
    /// Hull vertices, `class,x,y,order`; defaults to `<out stem>_hulls.csv`.
    #[arg(long)]
    pub hulls: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ForestArgs {
    #[arg(long, default_value_t = 65)]
    pub trees: usize,
    #[arg(long, default_value_t = 3)]
    pub mtry: usize,
    #[arg(long, value_enum, default_value = "gini")]
    pub criterion: CriterionArg,
    #[arg(long, value_enum, default_value = "tree")]
    pub subspace: SubspaceArg,
    #[arg(long)]
    pub max_depth: Option<usize>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

impl ForestArgs {
    fn params(&self) -> ForestParams {
        ForestParams {
            n_trees: self.trees,
            m_try: self.mtry,
            criterion: match self.criterion {
                CriterionArg::Gini => Criterion::Gini,
                CriterionArg::Entropy => Criterion::Entropy,
            },
            subspace: match self.subspace {
                SubspaceArg::Tree => SubspaceMode::Tree,
                SubspaceArg::Node => SubspaceMode::Node,
            },
            max_depth: self.max_depth,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Feature matrix CSV.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub forest: ForestArgs,
    /// Where to write the model.
    #[arg(long)]
    pub model: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Feature matrix CSV; its labels are ignored.
    #[arg(
        long,
        conflicts_with = "features",
        required_unless_present = "features"
    )]
    pub input: Option<PathBuf>,
    /// A single sample as `rsi=..,stoch_k=..,williams_r=..,macd=..,proc=..,obv=..`.
    #[arg(long, value_parser = parse_features)]
    pub features: Option<FeatureVector>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// The sample as `rsi=..,stoch_k=..,williams_r=..,macd=..,proc=..,obv=..`.
    #[arg(long, value_parser = parse_features)]
    pub features: FeatureVector,
}

#[derive(Debug, Args)]
pub struct ExportDotArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct OobArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// The feature matrix the model was trained on.
    #[arg(long)]
    pub input: PathBuf,
    /// Tree counts to report, ascending. Counts beyond the model's size
    /// retrain with the model's settings.
    #[arg(long, value_delimiter = ',')]
    pub curve: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub config: PathBuf,
}

/// Parses `key=value` pairs naming all six features exactly once.
pub fn parse_features(s: &str) -> Result<FeatureVector, String> {
    let mut values = [None; N_FEATURES];
    for pair in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| format!("expected key=value, found {pair:?}"))?;
        let feature: Feature = key
            .trim()
            .parse()
            .map_err(|_| format!("unknown feature {key:?}"))?;
        let v: f64 = value
            .trim()
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| format!("bad value for {key}: {value:?}"))?;
        if values[feature.index()].replace(v).is_some() {
            return Err(format!("{key} given twice"));
        }
    }
    let mut out = [0.0; N_FEATURES];
    for (f, (slot, v)) in Feature::ALL.iter().zip(out.iter_mut().zip(values)) {
        *slot = v.ok_or_else(|| format!("missing feature {}", f.key()))?;
    }
    Ok(FeatureVector(out))
}

type CmdResult = Result<(), String>;

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn write(path: &Path, contents: &str) -> CmdResult {
    write_file(path, contents).map_err(|e| e.to_string())
}

/// Writes to `path`, or to stdout when there is none.
fn emit(path: Option<&Path>, contents: &str, stdout: &mut dyn Write) -> CmdResult {
    match path {
        Some(p) => write(p, contents),
        None => stdout
            .write_all(contents.as_bytes())
            .map_err(|e| format!("stdout: {e}")),
    }
}

fn load_matrix(path: &Path) -> Result<FeatureMatrix, String> {
    parse_matrix(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_model(path: &Path) -> Result<Forest, String> {
    parse_model(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn ingest(args: &IngestArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CmdResult {
    let (text, source) = match (&args.input, &args.url) {
        (Some(p), _) => (read(p)?, p.display().to_string()),
        (None, Some(url)) => (
            fetch_remote(url, &args.symbol).map_err(|e| format!("{url}: {e}"))?,
            url.clone(),
        ),
        (None, None) => unreachable!("clap requires one source"),
    };
    let series = parse_csv(&text, &args.symbol).map_err(|e| format!("{source}: {e}"))?;
    let problems = validate(&series);
    if !problems.is_empty() {
        return Err(format!("{source}: invalid bars: {problems:?}"));
    }
    let bars = series.bars();
    let _ = writeln!(
        stderr,
        "{} bars from {} to {}",
        bars.len(),
        bars[0].date,
        bars[bars.len() - 1].date
    );
    emit(args.out.as_deref(), &write_csv(&series), stdout)
}

fn features(args: &FeaturesArgs, stdout: &mut dyn Write) -> CmdResult {
    let series = read_series(&args.input, "").map_err(|e| e.to_string())?;
    let smoothed = smooth(&series, args.alpha).map_err(|e| e.to_string())?;
    let raw = series.closes();
    let closes = match args.label_on {
        LabelOn::Smoothed => &smoothed.close,
        LabelOn::Raw => &raw,
    };
    let labels = label(closes, args.horizon).map_err(|e| e.to_string())?;
    let params = IndicatorParams {
        rsi_period: args.rsi_period,
        stoch_period: args.stoch_period,
        proc_window: args.proc_window.unwrap_or(args.horizon),
        flat_window: match args.flat_window {
            FlatWindow::Midpoint => FlatWindowPolicy::Midpoint,
            FlatWindow::Strict => FlatWindowPolicy::Strict,
        },
    };
    let matrix = build_matrix(&smoothed, &labels, &params).map_err(|e| e.to_string())?;
    if let Some(path) = &args.signal_out {
        let lines = macd(&smoothed.close).map_err(|e| e.to_string())?;
        let mut out = String::from("index,macd,signal\n");
        for (i, (m, s)) in lines.macd.iter().zip(&lines.signal).enumerate() {
            out.push_str(&format!("{i},{m},{s}\n"));
        }
        write(path, &out)?;
    }
    emit(args.out.as_deref(), &write_matrix(&matrix), stdout)
}

/// `<dir>/<stem>_hulls.csv` next to `out`.
pub fn default_hulls_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map_or_else(
        || "separability".into(),
        |s| s.to_string_lossy().into_owned(),
    );
    out.with_file_name(format!("{stem}_hulls.csv"))
}

fn separability(
    args: &SeparabilityArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CmdResult {
    let matrix = load_matrix(&args.input)?;
    let report = separability_report(&matrix).map_err(|e| e.to_string())?;
    if !report.constant_features.is_empty() {
        let names: Vec<&str> = report.constant_features.iter().map(|f| f.key()).collect();
        let _ = writeln!(stderr, "constant features dropped: {}", names.join(", "));
    }
    write(&args.out, &points_csv(&report))?;
    let hulls = args
        .hulls
        .clone()
        .unwrap_or_else(|| default_hulls_path(&args.out));
    write(&hulls, &hulls_csv(&report))?;
    let _ = writeln!(stdout, "separable: {}", report.separable);
    Ok(())
}

fn train(args: &TrainArgs, stdout: &mut dyn Write) -> CmdResult {
    let matrix = load_matrix(&args.input)?;
    let forest = train_parallel(&matrix, &args.forest.params()).map_err(|e| e.to_string())?;
    write(&args.model, &write_model(&forest))?;
    let oob =
        oob_error(&forest, &matrix.features(), &matrix.labels()).map_err(|e| e.to_string())?;
    let _ = writeln!(stdout, "oob_error {}", oob.error);
    Ok(())
}

fn predict(args: &PredictArgs, stdout: &mut dyn Write) -> CmdResult {
    let forest = load_model(&args.model)?;
    let rows: Vec<(usize, FeatureVector)> = match (&args.input, &args.features) {
        (Some(path), _) => load_matrix(path)?
            .rows
            .iter()
            .map(|r| (r.index, r.features))
            .collect(),
        (None, Some(x)) => vec![(0, *x)],
        (None, None) => unreachable!("clap requires one source"),
    };
    let mut out = String::from("index,prediction,rise_votes,fall_votes\n");
    for (index, x) in rows {
        let p = forest.predict(&x);
        out.push_str(&format!(
            "{index},{},{},{}\n",
            p.label.sign(),
            p.rise_votes,
            p.fall_votes
        ));
    }
    emit(args.out.as_deref(), &out, stdout)
}

fn trace_cmd(args: &TraceArgs, stdout: &mut dyn Write) -> CmdResult {
    let forest = load_model(&args.model)?;
    emit(None, &trace(&forest, &args.features).render(), stdout)
}

fn export_dots(args: &ExportDotArgs, stderr: &mut dyn Write) -> CmdResult {
    let forest = load_model(&args.model)?;
    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| format!("{}: {e}", args.out_dir.display()))?;
    for (k, tree) in forest.trees().iter().enumerate() {
        write(
            &args.out_dir.join(format!("tree_{k}.dot")),
            &export_dot(tree, k),
        )?;
    }
    let _ = writeln!(
        stderr,
        "wrote {} trees to {}",
        forest.n_trees(),
        args.out_dir.display()
    );
    Ok(())
}

fn oob(args: &OobArgs, stdout: &mut dyn Write) -> CmdResult {
    let forest = load_model(&args.model)?;
    let matrix = load_matrix(&args.input)?;
    let (x, y) = (matrix.features(), matrix.labels());
    let Some(curve) = &args.curve else {
        let est = oob_error(&forest, &x, &y).map_err(|e| e.to_string())?;
        let _ = writeln!(stdout, "oob_error {}", est.error);
        return Ok(());
    };
    if curve.is_empty() || curve[0] == 0 || curve.windows(2).any(|w| w[0] >= w[1]) {
        return Err("--curve needs positive, strictly ascending tree counts".into());
    }
    let points: Vec<(usize, f64)> = if curve[curve.len() - 1] <= forest.n_trees() {
        curve
            .iter()
            .map(|&b| oob_error_prefix(&forest, &x, &y, b).map(|e| (b, e.error)))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?
    } else {
        if x.len() != forest.n_train() {
            return Err(format!(
                "model was trained on {} rows, matrix has {}",
                forest.n_train(),
                x.len()
            ));
        }
        oob_curve(&x, &y, curve, forest.params()).map_err(|e| e.to_string())?
    };
    let mut out = String::from("trees,oob_error\n");
    for (b, e) in points {
        out.push_str(&format!("{b},{e}\n"));
    }
    emit(None, &out, stdout)
}

fn evaluate(args: &EvaluateArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CmdResult {
    let (config, defaults) = load_config(&args.config).map_err(|e| e.to_string())?;
    for d in defaults {
        let _ = writeln!(stderr, "default: {d}");
    }
    let report = evaluate_pipeline(&config).map_err(|e| e.to_string())?;
    let _ = writeln!(
        stderr,
        "wrote {} files to {}",
        report.files.len(),
        config.output_dir.display()
    );
    emit(None, &report.table(), stdout)
}

/// Parses `argv` (program name first) and runs the subcommand.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(rendered.as_bytes());
                EXIT_USAGE
            } else {
                let _ = stdout.write_all(rendered.as_bytes());
                EXIT_OK
            };
        }
    };
    let result = match &cli.command {
        Command::Ingest(a) => ingest(a, stdout, stderr),
        Command::Features(a) => features(a, stdout),
        Command::Separability(a) => separability(a, stdout, stderr),
        Command::Train(a) => train(a, stdout),
        Command::Predict(a) => predict(a, stdout),
        Command::Trace(a) => trace_cmd(a, stdout),
        Command::ExportDot(a) => export_dots(a, stderr),
        Command::Oob(a) => oob(a, stdout),
        Command::Evaluate(a) => evaluate(a, stdout, stderr),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_DATA
        }
    }
}
