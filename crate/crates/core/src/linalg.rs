//! Dense linear-algebra layer for the estimators: QR least squares with an
//! SVD rank check, collinear-column detection for error reporting, and
//! symmetric solves for GMM weighting matrices.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative rank tolerance: singular values below `RANK_TOL * sigma_max`
/// count as zero.
pub const RANK_TOL: f64 = 1e-10;

/// Singular values of `x`, descending.
pub fn singular_values(x: &DMatrix<f64>) -> Vec<f64> {
    x.clone().svd(false, false).singular_values.iter().copied().collect()
}

/// Numerical rank under `RANK_TOL`, with the absolute tolerance used.
pub fn rank(x: &DMatrix<f64>) -> (usize, f64) {
    let sv = singular_values(x);
    let smax = sv.first().copied().unwrap_or(0.0);
    let tol = RANK_TOL * smax;
    (sv.iter().filter(|&&s| s > tol).count(), tol)
}

/// Indices of columns that are (numerically) linear combinations of earlier
/// columns, located by a modified Gram-Schmidt sweep. Used only to name the
/// offending set in rank-deficiency errors.
pub fn collinear_columns(x: &DMatrix<f64>) -> Vec<usize> {
    let n = x.nrows();
    let k = x.ncols();
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut dependent = Vec::new();
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    for j in 0..k {
        let mut v = DVector::from_fn(n, |i, _| x[(i, j)]);
        let norm0 = v.norm().max(RANK_TOL * scale * (n as f64).sqrt());
        for b in &basis {
            let proj = b.dot(&v);
            v -= b * proj;
        }
        // Second pass for numerical stability of the orthogonalization.
        for b in &basis {
            let proj = b.dot(&v);
            v -= b * proj;
        }
        let res = v.norm();
        if res <= 1e-8 * norm0 {
            dependent.push(j);
        } else {
            basis.push(v / res);
        }
    }
    dependent
}

/// Verify full column rank; on failure, report the collinear column names.
pub fn require_full_rank(x: &DMatrix<f64>, names: &[String]) -> Result<()> {
    let (r, _) = rank(x);
    if r == x.ncols() {
        return Ok(());
    }
    let cols = collinear_columns(x);
    let named: Vec<String> = cols
        .iter()
        .map(|&j| {
            names
                .get(j)
                .cloned()
                .unwrap_or_else(|| format!("col{j}"))
        })
        .collect();
    Err(Error::Collinear(if named.is_empty() {
        vec!["<unidentified>".to_string()]
    } else {
        named
    }))
}

/// Least-squares solution of min ||y - X b|| via thin QR. The caller is
/// responsible for the rank check.
pub fn least_squares(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
    let qr = x.clone().qr();
    let q = qr.q();
    let r = qr.r();
    let qty = q.transpose() * y;
    back_substitute(&r, &qty)
        .ok_or_else(|| Error::Estimation("QR back-substitution hit a zero pivot".into()))
}

/// Least squares for every column of a right-hand-side matrix.
pub fn least_squares_multi(x: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let qr = x.clone().qr();
    let q = qr.q();
    let r = qr.r();
    let qtb = q.transpose() * b;
    let k = x.ncols();
    let mut out = DMatrix::zeros(k, b.ncols());
    for j in 0..b.ncols() {
        let col = DVector::from_fn(qtb.nrows(), |i, _| qtb[(i, j)]);
        let sol = back_substitute(&r, &col)
            .ok_or_else(|| Error::Estimation("QR back-substitution hit a zero pivot".into()))?;
        out.set_column(j, &sol);
    }
    Ok(out)
}

fn back_substitute(r: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let k = r.ncols();
    let mut x = DVector::zeros(k);
    for i in (0..k).rev() {
        let mut s = b[i];
        for j in (i + 1)..k {
            s -= r[(i, j)] * x[j];
        }
        let d = r[(i, i)];
        if d.abs() < 1e-300 {
            return None;
        }
        x[i] = s / d;
    }
    Some(x)
}

/// (X'X)^{-1} computed from the R factor of the QR decomposition.
pub fn xtx_inverse(x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let qr = x.clone().qr();
    let r = qr.r();
    let k = r.ncols();
    // R^{-1} column by column, then (X'X)^{-1} = R^{-1} R^{-T}.
    let mut rinv = DMatrix::zeros(k, k);
    for j in 0..k {
        let e = DVector::from_fn(k, |i, _| if i == j { 1.0 } else { 0.0 });
        let col = back_substitute(&r, &e)
            .ok_or_else(|| Error::Estimation("singular R factor in (X'X)^{-1}".into()))?;
        rinv.set_column(j, &col);
    }
    let inv = &rinv * rinv.transpose();
    Ok(symmetrize(&inv))
}

/// Solve the symmetric system A b = c, Cholesky first, SVD pseudo-inverse as
/// fallback for semidefinite A.
pub fn solve_sym(a: &DMatrix<f64>, c: &DVector<f64>) -> Result<DVector<f64>> {
    let a_sym = symmetrize(a);
    if let Some(chol) = nalgebra::Cholesky::new(a_sym.clone()) {
        return Ok(chol.solve(c));
    }
    let pinv = pseudo_inverse(&a_sym)?;
    Ok(&pinv * c)
}

/// Symmetric (pseudo-)inverse; falls back to SVD when Cholesky fails.
pub fn sym_inverse(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let a_sym = symmetrize(a);
    if let Some(chol) = nalgebra::Cholesky::new(a_sym.clone()) {
        return Ok(symmetrize(&chol.inverse()));
    }
    pseudo_inverse(&a_sym)
}

/// Moore-Penrose pseudo-inverse with the shared rank tolerance.
pub fn pseudo_inverse(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let out = svd
        .pseudo_inverse(RANK_TOL * smax.max(1e-300))
        .map_err(|e| Error::Estimation(format!("SVD pseudo-inverse failed: {e}")))?;
    Ok(symmetrize(&out))
}

/// Rank of a symmetric matrix under the shared tolerance.
pub fn sym_rank(a: &DMatrix<f64>) -> usize {
    rank(a).0
}

pub fn symmetrize(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn least_squares_exact_line() {
        // y = 2 + 3x fitted exactly.
        let x = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0]);
        let y = DVector::from_row_slice(&[2.0, 5.0, 8.0]);
        let b = least_squares(&x, &y).unwrap();
        assert!((b[0] - 2.0).abs() < 1e-12);
        assert!((b[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn least_squares_matches_normal_equations() {
        // Overdetermined 5-point fixture; oracle = explicit normal equations.
        let x = DMatrix::from_row_slice(
            5,
            2,
            &[1.0, 0.3, 1.0, 1.1, 1.0, 2.2, 1.0, 2.9, 1.0, 4.1],
        );
        let y = DVector::from_row_slice(&[0.7, 2.4, 4.1, 6.2, 8.3]);
        let b = least_squares(&x, &y).unwrap();
        let xtx = x.transpose() * &x;
        let xty = x.transpose() * &y;
        let oracle = xtx.try_inverse().unwrap() * xty;
        assert!((b[0] - oracle[0]).abs() < 1e-10);
        assert!((b[1] - oracle[1]).abs() < 1e-10);
    }

    #[test]
    fn rank_detects_duplicate_column() {
        let x = DMatrix::from_row_slice(4, 3, &[
            1.0, 2.0, 4.0, //
            1.0, 3.0, 6.0, //
            1.0, 5.0, 10.0, //
            1.0, 7.0, 14.0,
        ]);
        let (r, _) = rank(&x);
        assert_eq!(r, 2);
        assert_eq!(collinear_columns(&x), vec![2]);
    }

    #[test]
    fn xtx_inverse_matches_direct() {
        let x = DMatrix::from_row_slice(4, 2, &[1.0, 0.5, 1.0, 1.5, 1.0, 2.5, 1.0, 3.0]);
        let inv = xtx_inverse(&x).unwrap();
        let direct = (x.transpose() * &x).try_inverse().unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((inv[(i, j)] - direct[(i, j)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pseudo_inverse_of_singular_matrix() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let p = pseudo_inverse(&a).unwrap();
        // A A+ A = A.
        let round = &a * &p * &a;
        for i in 0..2 {
            for j in 0..2 {
                assert!((round[(i, j)] - a[(i, j)]).abs() < 1e-10);
            }
        }
    }
}
