//! Two-dimensional linear separability check on the feature matrix.
//!
//! Features are z-scored, projected onto their two leading principal
//! components, and each class is wrapped in a convex hull. Disjoint hulls mean
//! a separating line exists in the projected plane; overlapping hulls mean it
//! does not.

mod eigen;
mod hull;
mod pca;

use alloc::vec::Vec;

use thiserror::Error;

pub use eigen::symmetric_eigen;
pub use hull::{convex_hull, cross, hulls_intersect, segments_intersect, ConvexHull2D};
pub use pca::{covariance, pca_2d, Projection2D};

use crate::indicators::{Feature, FeatureMatrix, FeatureVector, N_FEATURES};
use crate::preprocess::Direction;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeparabilityError {
    #[error("need at least {needed} rows, got {got}")]
    TooFewRows { needed: usize, got: usize },
    #[error("feature {0} is constant")]
    ConstantFeature(Feature),
    #[error("both Rise and Fall rows are required")]
    SingleClassData,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Standardized {
    pub rows: Vec<[f64; N_FEATURES]>,
    pub mean: [f64; N_FEATURES],
    pub sd: [f64; N_FEATURES],
    /// Constant columns, mapped to all zeros.
    pub constant_features: Vec<Feature>,
}

/// Z-scores every column with the sample standard deviation.
///
/// Constant columns become zeros and are listed in the result, or are an
/// error when `strict` is set.
pub fn standardize(
    rows: &[FeatureVector],
    strict: bool,
) -> Result<Standardized, SeparabilityError> {
    if rows.len() < 2 {
        return Err(SeparabilityError::TooFewRows {
            needed: 2,
            got: rows.len(),
        });
    }
    let n = rows.len() as f64;
    let mut mean = [0.0; N_FEATURES];
    let mut sd = [0.0; N_FEATURES];
    let mut constant_features = Vec::new();
    for f in Feature::ALL {
        let j = f.index();
        mean[j] = rows.iter().map(|r| r.0[j]).sum::<f64>() / n;
        let ss: f64 = rows.iter().map(|r| (r.0[j] - mean[j]).powi(2)).sum();
        sd[j] = libm::sqrt(ss / (n - 1.0));
        if sd[j] == 0.0 || sd[j] <= 1e-12 * mean[j].abs() {
            if strict {
                return Err(SeparabilityError::ConstantFeature(f));
            }
            constant_features.push(f);
        }
    }
    let z = rows
        .iter()
        .map(|r| {
            core::array::from_fn(|j| {
                if constant_features.iter().any(|f| f.index() == j) {
                    0.0
                } else {
                    (r.0[j] - mean[j]) / sd[j]
                }
            })
        })
        .collect();
    Ok(Standardized {
        rows: z,
        mean,
        sd,
        constant_features,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparabilityReport {
    /// True when the two class hulls in the projected plane are disjoint.
    pub separable: bool,
    pub projection: Projection2D<N_FEATURES>,
    /// Label of each projected point.
    pub labels: Vec<Direction>,
    pub rise_hull: ConvexHull2D,
    pub fall_hull: ConvexHull2D,
    pub constant_features: Vec<Feature>,
}

impl SeparabilityReport {
    pub fn hull(&self, class: Direction) -> &ConvexHull2D {
        match class {
            Direction::Rise => &self.rise_hull,
            Direction::Fall => &self.fall_hull,
        }
    }
}

pub fn separability_report(
    matrix: &FeatureMatrix,
) -> Result<SeparabilityReport, SeparabilityError> {
    if !matrix.has_both_classes() {
        return Err(SeparabilityError::SingleClassData);
    }
    let z = standardize(&matrix.features(), false)?;
    let projection = pca_2d(&z.rows)?;
    let labels = matrix.labels();
    let class_points = |class: Direction| -> Vec<Point> {
        projection
            .points
            .iter()
            .zip(&labels)
            .filter(|(_, &l)| l == class)
            .map(|(p, _)| *p)
            .collect()
    };
    let rise_hull = convex_hull(&class_points(Direction::Rise));
    let fall_hull = convex_hull(&class_points(Direction::Fall));
    Ok(SeparabilityReport {
        separable: !hulls_intersect(&rise_hull, &fall_hull),
        projection,
        labels,
        rise_hull,
        fall_hull,
        constant_features: z.constant_features,
    })
}
