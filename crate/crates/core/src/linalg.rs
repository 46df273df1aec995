//! Dense kernels for the tiny per-point matrices (n <= 4 in practice):
//! Jacobi eigenvalues and Gauss-Jordan inversion.

/// Eigenvalues of a symmetric n x n matrix (row-major), ascending.
/// Cyclic Jacobi; plenty for the 2x2 and 3x3 blocks this crate meets.
pub(crate) fn symmetric_eigenvalues(matrix: &[f64], n: usize) -> Vec<f64> {
    debug_assert_eq!(matrix.len(), n * n);
    let mut a = matrix.to_vec();
    for _sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eigs: Vec<f64> = (0..n).map(|k| a[k * n + k]).collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eigs
}

/// Inverse and determinant of a symmetric matrix via Gauss-Jordan with
/// partial pivoting. Returns `None` when the pivot collapses. The returned
/// inverse is re-symmetrized so downstream contractions see an exactly
/// symmetric matrix.
pub(crate) fn invert_symmetric(matrix: &[f64], n: usize) -> Option<(Vec<f64>, f64)> {
    debug_assert_eq!(matrix.len(), n * n);
    let mut a = matrix.to_vec();
    let mut inv = vec![0.0; n * n];
    for k in 0..n {
        inv[k * n + k] = 1.0;
    }
    let mut det = 1.0;
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r1, &r2| {
                a[r1 * n + col]
                    .abs()
                    .partial_cmp(&a[r2 * n + col].abs())
                    .unwrap()
            })
            .unwrap();
        let pivot = a[pivot_row * n + col];
        if pivot.abs() < 1e-300 {
            return None;
        }
        if pivot_row != col {
            for k in 0..n {
                a.swap(col * n + k, pivot_row * n + k);
                inv.swap(col * n + k, pivot_row * n + k);
            }
            det = -det;
        }
        det *= pivot;
        let scale = 1.0 / pivot;
        for k in 0..n {
            a[col * n + k] *= scale;
            inv[col * n + k] *= scale;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = a[row * n + col];
            if factor == 0.0 {
                continue;
            }
            for k in 0..n {
                a[row * n + k] -= factor * a[col * n + k];
                inv[row * n + k] -= factor * inv[col * n + k];
            }
        }
    }
    for p in 0..n {
        for q in (p + 1)..n {
            let v = 0.5 * (inv[p * n + q] + inv[q * n + p]);
            inv[p * n + q] = v;
            inv[q * n + p] = v;
        }
    }
    Some((inv, det))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalues_of_known_matrix() {
        // eigenvalues of [[2,1],[1,2]] are 1 and 3
        let eigs = symmetric_eigenvalues(&[2.0, 1.0, 1.0, 2.0], 2);
        assert!((eigs[0] - 1.0).abs() < 1e-12);
        assert!((eigs[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_detect_indefiniteness() {
        let eigs = symmetric_eigenvalues(&[1.0, 2.0, 2.0, 1.0], 3 - 1);
        assert!(eigs[0] < 0.0);
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let m = [2.0, 0.3, 0.1, 0.3, 1.5, -0.2, 0.1, -0.2, 1.1];
        let (inv, det) = invert_symmetric(&m, 3).unwrap();
        assert!(det > 0.0);
        for p in 0..3 {
            for q in 0..3 {
                let prod: f64 = (0..3).map(|k| m[p * 3 + k] * inv[k * 3 + q]).sum();
                let expected = if p == q { 1.0 } else { 0.0 };
                assert!((prod - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let m = [1.0, 1.0, 1.0, 1.0];
        assert!(invert_symmetric(&m, 2).is_none());
    }

    #[test]
    fn determinant_of_diagonal() {
        let m = [3.0, 0.0, 0.0, 0.5];
        let (_, det) = invert_symmetric(&m, 2).unwrap();
        assert!((det - 1.5).abs() < 1e-14);
    }
}
