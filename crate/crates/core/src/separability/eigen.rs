#![allow(clippy::needless_range_loop)]

//! Cyclic Jacobi eigensolver for small symmetric matrices.

const MAX_SWEEPS: usize = 64;

/// Eigenvalues (descending) and unit eigenvectors (`vectors[i]` pairs with
/// `values[i]`) of the symmetric matrix `a`.
///
/// Rotations sweep the upper triangle in fixed row-major order, and ties in
/// the final ordering keep the lower diagonal index first, so the result is
/// deterministic.
pub fn symmetric_eigen<const D: usize>(a: &[[f64; D]; D]) -> ([f64; D], [[f64; D]; D]) {
    let mut m = *a;
    // v's columns accumulate the rotations.
    let mut v = [[0.0; D]; D];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let scale: f64 = m
        .iter()
        .flatten()
        .map(|x| x * x)
        .sum::<f64>()
        .max(f64::MIN_POSITIVE);
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..D)
            .flat_map(|p| (p + 1..D).map(move |q| (p, q)))
            .map(|(p, q)| m[p][q] * m[p][q])
            .sum();
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..D {
            for q in p + 1..D {
                if m[p][q] == 0.0 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..D {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..D {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut order: [usize; D] = core::array::from_fn(|i| i);
    order.sort_by(|&i, &j| m[j][j].total_cmp(&m[i][i]).then(i.cmp(&j)));
    let values = order.map(|i| m[i][i]);
    let vectors = order.map(|i| core::array::from_fn(|k| v[k][i]));
    (values, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat_vec<const D: usize>(a: &[[f64; D]; D], x: &[f64; D]) -> [f64; D] {
        core::array::from_fn(|i| (0..D).map(|k| a[i][k] * x[k]).sum())
    }

    #[test]
    fn diagonal_matrix() {
        let a = [[1.0, 0.0, 0.0], [0.0, 3.0, 0.0], [0.0, 0.0, 2.0]];
        let (vals, vecs) = symmetric_eigen(&a);
        assert_eq!(vals, [3.0, 2.0, 1.0]);
        assert_eq!(vecs[0], [0.0, 1.0, 0.0]);
    }

    #[test]
    fn two_by_two_known() {
        // Eigenvalues of [[2,1],[1,2]] are 3 and 1.
        let (vals, vecs) = symmetric_eigen(&[[2.0, 1.0], [1.0, 2.0]]);
        assert!((vals[0] - 3.0).abs() < 1e-12 && (vals[1] - 1.0).abs() < 1e-12);
        assert!((vecs[0][0].abs() - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn residuals_and_orthonormality() {
        let a = [
            [4.0, 1.0, -2.0, 0.5, 0.0, 1.0],
            [1.0, 3.0, 0.0, 1.5, -1.0, 0.0],
            [-2.0, 0.0, 5.0, 0.0, 2.0, 0.3],
            [0.5, 1.5, 0.0, 2.0, 0.0, -0.7],
            [0.0, -1.0, 2.0, 0.0, 6.0, 0.1],
            [1.0, 0.0, 0.3, -0.7, 0.1, 1.0],
        ];
        let (vals, vecs) = symmetric_eigen(&a);
        for i in 0..6 {
            let av = mat_vec(&a, &vecs[i]);
            for k in 0..6 {
                assert!((av[k] - vals[i] * vecs[i][k]).abs() < 1e-10);
            }
            for j in 0..6 {
                let dot: f64 = (0..6).map(|k| vecs[i][k] * vecs[j][k]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-10);
            }
        }
        assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        let trace: f64 = (0..6).map(|i| a[i][i]).sum();
        assert!((vals.iter().sum::<f64>() - trace).abs() < 1e-10);
    }
}
