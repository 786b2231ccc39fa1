//! Text renderings of evaluation and separability results.
//!
//! Floats are written in Rust's shortest round-trip form, which does not
//! depend on the platform or locale.

use std::fmt::Write as _;

use trendforest_core::evaluate::{ChebyshevBound, HorizonReport, RocCurve};
use trendforest_core::separability::SeparabilityReport;
use trendforest_core::Direction;

pub const REPORT_HEADER: &str = "horizon_days,accuracy,precision,recall,specificity,auc,oob_error,strength,margin_variance,chebyshev_bound";

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".to_string(), |x| x.to_string())
}

pub fn report_csv(reports: &[HorizonReport]) -> String {
    let mut out = format!("{REPORT_HEADER}\n");
    for r in reports {
        let bound = match r.margin.chebyshev_bound {
            ChebyshevBound::Bounded(b) => b.to_string(),
            ChebyshevBound::Unbounded => "unbounded".to_string(),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.horizon,
            opt(r.metrics.accuracy),
            opt(r.metrics.precision),
            opt(r.metrics.recall),
            opt(r.metrics.specificity),
            opt(r.roc.as_ref().map(|c| c.auc)),
            r.oob.error,
            r.margin.strength,
            r.margin.variance,
            bound
        );
    }
    out
}

/// `threshold,fpr,tpr`; the first point's threshold is `inf`.
pub fn roc_csv(curve: &RocCurve) -> String {
    let mut out = String::from("threshold,fpr,tpr\n");
    for p in &curve.points {
        let _ = writeln!(out, "{},{},{}", p.threshold, p.fpr, p.tpr);
    }
    out
}

/// Console table, one row per horizon.
pub fn summary_table(reports: &[HorizonReport]) -> String {
    let cell = |v: Option<f64>, scale: f64, places: usize| {
        v.map_or_else(
            || "undefined".to_string(),
            |x| format!("{:.*}", places, x * scale),
        )
    };
    let mut out = format!(
        "{:<16}{:>11}{:>11}{:>11}{:>13}\n",
        "Trading Period", "Accuracy%", "Precision", "Recall", "Specificity"
    );
    for r in reports {
        let m = &r.metrics;
        let _ = writeln!(
            out,
            "{:<16}{:>11}{:>11}{:>11}{:>13}",
            r.horizon,
            cell(m.accuracy, 100.0, 2),
            cell(m.precision, 1.0, 4),
            cell(m.recall, 1.0, 4),
            cell(m.specificity, 1.0, 4)
        );
    }
    out
}

/// Projected points as `x,y,label` with labels `1`/`-1`.
pub fn points_csv(report: &SeparabilityReport) -> String {
    let mut out = String::from("x,y,label\n");
    for (p, label) in report.projection.points.iter().zip(&report.labels) {
        let _ = writeln!(out, "{},{},{}", p.x, p.y, label.sign());
    }
    out
}

/// Hull vertices as `class,x,y,order`, counter-clockwise per class.
pub fn hulls_csv(report: &SeparabilityReport) -> String {
    let mut out = String::from("class,x,y,order\n");
    for class in [Direction::Rise, Direction::Fall] {
        for (i, v) in report.hull(class).vertices.iter().enumerate() {
            let _ = writeln!(out, "{},{},{},{}", class.sign(), v.x, v.y, i);
        }
    }
    out
}
