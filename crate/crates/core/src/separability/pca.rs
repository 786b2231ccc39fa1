#![allow(clippy::needless_range_loop)]

//! Projection onto the two leading principal components.

use alloc::vec::Vec;

use super::eigen::symmetric_eigen;
use super::{Point, SeparabilityError};

#[derive(Debug, Clone, PartialEq)]
pub struct Projection2D<const D: usize> {
    /// One projected point per input row, in input order.
    pub points: Vec<Point>,
    /// Orthonormal principal directions, leading component first.
    pub components: [[f64; D]; 2],
    /// Covariance eigenvalues matching `components`, descending.
    pub explained_variance: [f64; 2],
    /// Sum of all covariance eigenvalues (the total variance).
    pub total_variance: f64,
    pub mean: [f64; D],
}

impl<const D: usize> Projection2D<D> {
    pub fn project(&self, row: &[f64; D]) -> Point {
        let c = |k: usize| {
            (0..D)
                .map(|i| (row[i] - self.mean[i]) * self.components[k][i])
                .sum::<f64>()
        };
        Point::new(c(0), c(1))
    }
}

/// Sample covariance (divisor `n - 1`) of `rows` and their column means.
pub fn covariance<const D: usize>(rows: &[[f64; D]]) -> ([[f64; D]; D], [f64; D]) {
    let n = rows.len() as f64;
    let mut mean = [0.0; D];
    for r in rows {
        for i in 0..D {
            mean[i] += r[i];
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut cov = [[0.0; D]; D];
    for r in rows {
        for i in 0..D {
            for j in i..D {
                cov[i][j] += (r[i] - mean[i]) * (r[j] - mean[j]);
            }
        }
    }
    for i in 0..D {
        for j in i..D {
            cov[i][j] /= n - 1.0;
            cov[j][i] = cov[i][j];
        }
    }
    (cov, mean)
}

/// Flips `v` so its largest-magnitude coordinate (first one on ties) is positive.
fn orient<const D: usize>(mut v: [f64; D]) -> [f64; D] {
    let mut lead = 0;
    for i in 1..D {
        if v[i].abs() > v[lead].abs() {
            lead = i;
        }
    }
    if v[lead] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    v
}

/// Principal component analysis keeping the top two components.
pub fn pca_2d<const D: usize>(rows: &[[f64; D]]) -> Result<Projection2D<D>, SeparabilityError> {
    if rows.len() < 3 {
        return Err(SeparabilityError::TooFewRows {
            needed: 3,
            got: rows.len(),
        });
    }
    assert!(
        D >= 2,
        "need at least two dimensions to project onto a plane"
    );
    let (cov, mean) = covariance(rows);
    let (values, vectors) = symmetric_eigen(&cov);
    let mut proj = Projection2D {
        points: Vec::new(),
        components: [orient(vectors[0]), orient(vectors[1])],
        explained_variance: [values[0].max(0.0), values[1].max(0.0)],
        total_variance: (0..D).map(|i| cov[i][i]).sum(),
        mean,
    };
    proj.points = rows.iter().map(|r| proj.project(r)).collect();
    Ok(proj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::tree_rng;
    use rand::Rng;

    fn dist(a: Point, b: Point) -> f64 {
        libm::hypot(a.x - b.x, a.y - b.y)
    }

    #[test]
    fn line_data_is_rank_one() {
        let dir = [1.0, -2.0, 0.5, 3.0, 0.0, 1.0];
        let rows: Vec<[f64; 6]> = (0..30)
            .map(|i| dir.map(|d| d * (i as f64 - 7.0) + 0.25))
            .collect();
        let p = pca_2d(&rows).unwrap();
        assert!(p.explained_variance[0] >= 0.999 * p.total_variance);
        assert!(p.explained_variance[1] <= 1e-9 * p.total_variance);
    }

    #[test]
    fn planar_data_keeps_distances() {
        let mut rng = tree_rng(5, 0);
        let rows: Vec<[f64; 6]> = (0..40)
            .map(|_| {
                [
                    rng.random_range(-3.0..3.0),
                    rng.random_range(-1.0..1.0),
                    0.0,
                    0.0,
                    0.0,
                    0.0,
                ]
            })
            .collect();
        let p = pca_2d(&rows).unwrap();
        for i in 0..rows.len() {
            for j in 0..rows.len() {
                let d6 = libm::hypot(rows[i][0] - rows[j][0], rows[i][1] - rows[j][1]);
                assert!((dist(p.points[i], p.points[j]) - d6).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn leading_component_beats_random_directions() {
        let mut rng = tree_rng(6, 0);
        let rows: Vec<[f64; 6]> = (0..50)
            .map(|_| {
                let base: [f64; 6] = core::array::from_fn(|_| rng.random_range(-1.0..1.0));
                [
                    base[0] * 3.0,
                    base[1] + base[0],
                    base[2],
                    base[3] * 0.5,
                    base[4],
                    base[5] * 2.0,
                ]
            })
            .collect();
        let p = pca_2d(&rows).unwrap();
        let variance_along = |u: &[f64; 6]| {
            let proj: Vec<f64> = rows
                .iter()
                .map(|r| (0..6).map(|i| (r[i] - p.mean[i]) * u[i]).sum())
                .collect();
            let m = proj.iter().sum::<f64>() / proj.len() as f64;
            proj.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (proj.len() as f64 - 1.0)
        };
        let lead = variance_along(&p.components[0]);
        assert!((lead - p.explained_variance[0]).abs() < 1e-9 * lead);
        for _ in 0..1000 {
            let mut u: [f64; 6] = core::array::from_fn(|_| rng.random_range(-1.0..1.0));
            let norm = libm::sqrt(u.iter().map(|x| x * x).sum());
            u.iter_mut().for_each(|x| *x /= norm);
            assert!(variance_along(&u) <= lead + 1e-9);
        }
    }

    #[test]
    fn components_orthonormal_and_oriented() {
        let mut rng = tree_rng(7, 0);
        let rows: Vec<[f64; 6]> = (0..25)
            .map(|_| core::array::from_fn(|i| rng.random_range(-1.0..1.0) * (i + 1) as f64))
            .collect();
        let p = pca_2d(&rows).unwrap();
        let dot = |a: &[f64; 6], b: &[f64; 6]| (0..6).map(|i| a[i] * b[i]).sum::<f64>();
        assert!((dot(&p.components[0], &p.components[0]) - 1.0).abs() < 1e-9);
        assert!((dot(&p.components[1], &p.components[1]) - 1.0).abs() < 1e-9);
        assert!(dot(&p.components[0], &p.components[1]).abs() < 1e-9);
        assert!(p.explained_variance[0] >= p.explained_variance[1]);
        assert!(p.explained_variance.iter().sum::<f64>() <= p.total_variance + 1e-9);
        for c in &p.components {
            let lead = c
                .iter()
                .copied()
                .fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
            assert!(lead > 0.0);
        }
    }

    #[test]
    fn too_few_rows() {
        assert_eq!(
            pca_2d(&[[0.0; 6]; 2]),
            Err(SeparabilityError::TooFewRows { needed: 3, got: 2 })
        );
    }
}
