//! Cyclic Jacobi eigendecomposition for real symmetric matrices.
//!
//! O(n^3) per sweep, which is fine at document scale (n = regions per
//! document), fully deterministic, and dependency-free.

use ndarray::Array2;

use crate::error::{Error, Result};

/// Input must be symmetric within this tolerance.
const SYMMETRY_TOLERANCE: f64 = 1e-9;

/// Decompose a symmetric matrix `A = V diag(λ) Vᵀ`.
///
/// Returns eigenvalues in ascending order and the matching orthonormal
/// eigenvectors as the columns of the returned matrix. Rotations run in
/// cyclic sweeps until every off-diagonal magnitude is at most `tolerance`
/// or `max_sweeps` is exhausted (an error). Each eigenvector's first
/// nonzero component is made positive so results are reproducible.
pub fn symmetric_eigendecomposition(
    a: &Array2<f64>,
    tolerance: f64,
    max_sweeps: usize,
) -> Result<(Vec<f64>, Array2<f64>)> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Validation(format!(
            "matrix must be square, got {}x{}",
            n,
            a.ncols()
        )));
    }
    for i in 0..n {
        for j in 0..i {
            if (a[(i, j)] - a[(j, i)]).abs() > SYMMETRY_TOLERANCE {
                return Err(Error::Validation(format!(
                    "matrix is not symmetric at ({i},{j}): {} vs {}",
                    a[(i, j)],
                    a[(j, i)]
                )));
            }
        }
        if !a.row(i).iter().all(|v| v.is_finite()) {
            return Err(Error::Validation("matrix has non-finite entries".into()));
        }
    }
    if n == 0 {
        return Ok((Vec::new(), Array2::zeros((0, 0))));
    }

    // Work on the exactly-symmetrized copy; for symmetric input this is the
    // identity transformation.
    let mut m = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = (a[(i, j)] + a[(j, i)]) / 2.0;
        }
    }
    let mut v: Array2<f64> = Array2::eye(n);

    let mut converged = n == 1;
    for _ in 0..max_sweeps {
        if converged {
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq.abs() <= tolerance {
                    continue;
                }
                rotate(&mut m, &mut v, p, q);
            }
        }
        let mut off_max = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off_max = off_max.max(m[(i, j)].abs());
            }
        }
        converged = off_max <= tolerance;
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: max_sweeps });
    }

    // Sort eigenvalues ascending, stably, carrying the eigenvectors along.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]).then(i.cmp(&j)));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = Array2::zeros((n, n));
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, col)] = v[(row, src)];
        }
    }
    fix_signs(&mut vectors);
    Ok((eigenvalues, vectors))
}

/// One Jacobi rotation annihilating m[(p, q)].
fn rotate(m: &mut Array2<f64>, v: &mut Array2<f64>, p: usize, q: usize) {
    let n = m.nrows();
    let apq = m[(p, q)];
    let app = m[(p, p)];
    let aqq = m[(q, q)];

    let h = aqq - app;
    let t = if h == 0.0 {
        1.0
    } else {
        let theta = h / (2.0 * apq);
        if theta.abs() > 1e153 {
            // theta^2 would overflow; use the asymptotic rotation.
            1.0 / (2.0 * theta)
        } else {
            let t = 1.0 / (theta.abs() + (theta * theta + 1.0).sqrt());
            if theta < 0.0 {
                -t
            } else {
                t
            }
        }
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    m[(p, p)] = app - t * apq;
    m[(q, q)] = aqq + t * apq;
    m[(p, q)] = 0.0;
    m[(q, p)] = 0.0;
    for i in 0..n {
        if i == p || i == q {
            continue;
        }
        let aip = m[(i, p)];
        let aiq = m[(i, q)];
        let new_p = c * aip - s * aiq;
        let new_q = s * aip + c * aiq;
        m[(i, p)] = new_p;
        m[(p, i)] = new_p;
        m[(i, q)] = new_q;
        m[(q, i)] = new_q;
    }
    for i in 0..n {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = c * vip - s * viq;
        v[(i, q)] = s * vip + c * viq;
    }
}

/// Make the first nonzero component of each column positive.
fn fix_signs(vectors: &mut Array2<f64>) {
    let (n, cols) = vectors.dim();
    for col in 0..cols {
        for row in 0..n {
            let x = vectors[(row, col)];
            if x != 0.0 {
                if x < 0.0 {
                    for r in 0..n {
                        vectors[(r, col)] = -vectors[(r, col)];
                    }
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-10;
    const SWEEPS: usize = 100;

    fn reconstruction_residual(a: &Array2<f64>, values: &[f64], vectors: &Array2<f64>) -> f64 {
        let n = a.nrows();
        let mut max = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut rebuilt = 0.0;
                for k in 0..n {
                    rebuilt += vectors[(i, k)] * values[k] * vectors[(j, k)];
                }
                max = max.max((a[(i, j)] - rebuilt).abs());
            }
        }
        max
    }

    fn orthonormality_residual(vectors: &Array2<f64>) -> f64 {
        let n = vectors.nrows();
        let mut max = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut dot = 0.0;
                for k in 0..n {
                    dot += vectors[(k, i)] * vectors[(k, j)];
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                max = max.max((dot - expect).abs());
            }
        }
        max
    }

    #[test]
    fn diagonal_matrix_is_exact() {
        let a = Array2::from_diag(&ndarray::arr1(&[3.0, 1.0, 2.0]));
        let (values, vectors) = symmetric_eigendecomposition(&a, TOL, SWEEPS).unwrap();
        assert_eq!(values, vec![1.0, 2.0, 3.0]);
        // columns are a signed permutation of the identity
        for col in 0..3 {
            let ones: Vec<f64> = (0..3).map(|r| vectors[(r, col)]).collect();
            assert_eq!(ones.iter().filter(|v| v.abs() == 1.0).count(), 1);
            assert_eq!(ones.iter().filter(|v| **v == 0.0).count(), 2);
        }
    }

    #[test]
    fn two_by_two_closed_form() {
        // eigenvalues of [[2,1],[1,2]] are 1 and 3
        let a = ndarray::arr2(&[[2.0, 1.0], [1.0, 2.0]]);
        let (values, vectors) = symmetric_eigendecomposition(&a, TOL, SWEEPS).unwrap();
        assert!((values[0] - 1.0).abs() < 1e-10);
        assert!((values[1] - 3.0).abs() < 1e-10);
        assert!(reconstruction_residual(&a, &values, &vectors) < 1e-10);
    }

    #[test]
    fn random_symmetric_has_small_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2usize, 3, 5, 8, 13] {
            let mut a = Array2::zeros((n, n));
            for i in 0..n {
                for j in 0..=i {
                    let x: f64 = rng.gen_range(-1.0..1.0);
                    a[(i, j)] = x;
                    a[(j, i)] = x;
                }
            }
            let (values, vectors) = symmetric_eigendecomposition(&a, TOL, SWEEPS).unwrap();
            let max_a = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(
                reconstruction_residual(&a, &values, &vectors) <= 1e-8 * (1.0 + max_a),
                "n = {n}"
            );
            assert!(orthonormality_residual(&vectors) <= 1e-8, "n = {n}");
            for w in values.windows(2) {
                assert!(w[0] <= w[1]);
            }
        }
    }

    #[test]
    fn asymmetric_input_rejected() {
        let a = ndarray::arr2(&[[1.0, 2.0], [0.5, 1.0]]);
        assert!(symmetric_eigendecomposition(&a, TOL, SWEEPS).is_err());
    }

    #[test]
    fn sweep_limit_reported() {
        let a = ndarray::arr2(&[[2.0, 1.0], [1.0, 2.0]]);
        let err = symmetric_eigendecomposition(&a, 0.0, 0).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { sweeps: 0 }));
    }

    #[test]
    fn sign_convention_is_applied() {
        let a = ndarray::arr2(&[[2.0, 1.0], [1.0, 2.0]]);
        let (_, vectors) = symmetric_eigendecomposition(&a, TOL, SWEEPS).unwrap();
        for col in 0..2 {
            let first = (0..2).map(|r| vectors[(r, col)]).find(|v| *v != 0.0).unwrap();
            assert!(first > 0.0);
        }
    }
}
