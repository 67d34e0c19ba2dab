//! Small direct solvers for the banded systems that appear in time stepping
//! and smoothing.

/// Solve a tridiagonal system by the Thomas algorithm.
///
/// `lower` and `upper` have length `n - 1`, `diag` and `rhs` length `n`.
/// The factorization works in scratch copies; inputs are untouched.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    assert!(n >= 2, "tridiagonal solve needs n >= 2");
    assert_eq!(lower.len(), n - 1);
    assert_eq!(upper.len(), n - 1);
    assert_eq!(rhs.len(), n);

    let mut d = diag.to_vec();
    let mut r = rhs.to_vec();
    for i in 1..n {
        let m = lower[i - 1] / d[i - 1];
        d[i] -= m * upper[i - 1];
        r[i] -= m * r[i - 1];
    }
    let mut x = vec![0.0; n];
    x[n - 1] = r[n - 1] / d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = (r[i] - upper[i] * x[i + 1]) / d[i];
    }
    x
}

/// Solve a symmetric positive definite pentadiagonal system by banded
/// Cholesky (bandwidth 2).
///
/// `diag` has length `n`, `off1` the first off-diagonal (length `n - 1`),
/// `off2` the second (length `n - 2`).
pub fn solve_pentadiagonal_spd(diag: &[f64], off1: &[f64], off2: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    assert!(n >= 3, "pentadiagonal solve needs n >= 3");
    assert_eq!(off1.len(), n - 1);
    assert_eq!(off2.len(), n - 2);
    assert_eq!(rhs.len(), n);

    // L D L^T with unit lower triangular L stored in its two bands.
    let mut d = vec![0.0; n]; // pivots
    let mut l1 = vec![0.0; n - 1]; // L[i+1][i]
    let mut l2 = vec![0.0; n - 2]; // L[i+2][i]
    for i in 0..n {
        let mut di = diag[i];
        if i >= 1 {
            di -= l1[i - 1] * l1[i - 1] * d[i - 1];
        }
        if i >= 2 {
            di -= l2[i - 2] * l2[i - 2] * d[i - 2];
        }
        assert!(di > 0.0, "matrix not positive definite at row {i}");
        d[i] = di;
        if i + 1 < n {
            let mut v = off1[i];
            if i >= 1 {
                v -= l2[i - 1] * l1[i - 1] * d[i - 1];
            }
            l1[i] = v / di;
        }
        if i + 2 < n {
            l2[i] = off2[i] / di;
        }
    }

    // Forward substitution L y = rhs.
    let mut y = rhs.to_vec();
    for i in 1..n {
        y[i] -= l1[i - 1] * y[i - 1];
        if i >= 2 {
            y[i] -= l2[i - 2] * y[i - 2];
        }
    }
    // Diagonal scale and back substitution L^T x = y.
    for i in 0..n {
        y[i] /= d[i];
    }
    for i in (0..n).rev() {
        if i + 1 < n {
            y[i] -= l1[i] * y[i + 1];
        }
        if i + 2 < n {
            y[i] -= l2[i] * y[i + 2];
        }
    }
    y
}

#[cfg(test)]
pub(crate) mod dense {
    /// Dense Gaussian elimination with partial pivoting, used as an
    /// independent oracle for the banded solvers.
    pub fn solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let mut m: Vec<Vec<f64>> = a.iter().cloned().collect();
        let mut r = b.to_vec();
        for k in 0..n {
            let piv = (k..n)
                .max_by(|&i, &j| m[i][k].abs().partial_cmp(&m[j][k].abs()).unwrap())
                .unwrap();
            m.swap(k, piv);
            r.swap(k, piv);
            for i in k + 1..n {
                let f = m[i][k] / m[k][k];
                for j in k..n {
                    m[i][j] -= f * m[k][j];
                }
                r[i] -= f * r[k];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = r[i];
            for j in i + 1..n {
                s -= m[i][j] * x[j];
            }
            x[i] = s / m[i][i];
        }
        x
    }
}
