//! Thin wrappers around the dense SVD: deterministic sign convention
//! and the pseudo-inverse used by the regression stage.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Economy SVD `M = U diag(s) V^T` with `m = min(rows, cols)` columns.
///
/// Singular values come back descending. Signs are fixed so that in each
/// column of `U` the entry of largest magnitude is nonnegative, with the
/// matching column of `V` flipped in tandem; ties resolve to the first
/// maximal index, which makes the factorization deterministic.
pub(crate) fn economy_svd(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, Vec<f64>, DMatrix<f64>)> {
    let (rows, cols) = m.shape();
    let svd = m
        .clone()
        .try_svd(true, true, f64::EPSILON, 0)
        .ok_or(Error::ConvergenceFailure { rows, cols })?;
    let mut u = svd.u.expect("u requested");
    let s: Vec<f64> = svd.singular_values.iter().copied().collect();
    let mut v = svd.v_t.expect("v_t requested").transpose();

    for j in 0..u.ncols() {
        let mut best = 0usize;
        let mut best_abs = -1.0f64;
        for i in 0..u.nrows() {
            let a = u[(i, j)].abs();
            if a > best_abs {
                best_abs = a;
                best = i;
            }
        }
        if u[(best, j)] < 0.0 {
            for i in 0..u.nrows() {
                u[(i, j)] = -u[(i, j)];
            }
            for i in 0..v.nrows() {
                v[(i, j)] = -v[(i, j)];
            }
        }
    }
    Ok((u, s, v))
}

/// Moore-Penrose pseudo-inverse via the SVD with a relative cutoff.
///
/// Directions with `s_i <= cutoff_rel * s_max` are discarded. Errors with
/// `RankDeficient` when nothing survives the cutoff.
pub(crate) fn pinv(m: &DMatrix<f64>, cutoff_rel: f64) -> Result<DMatrix<f64>> {
    let (u, s, v) = economy_svd(m)?;
    let s_max = s.first().copied().unwrap_or(0.0);
    let cutoff = cutoff_rel * s_max;
    let kept: Vec<usize> = (0..s.len()).filter(|&i| s[i] > cutoff && s[i] > 0.0).collect();
    if kept.is_empty() {
        return Err(Error::RankDeficient);
    }
    // pinv = V diag(1/s) U^T restricted to the kept directions
    let mut out = DMatrix::<f64>::zeros(m.ncols(), m.nrows());
    for &i in &kept {
        let vi = v.column(i);
        let ui = u.column(i);
        let inv_s = 1.0 / s[i];
        for r in 0..out.nrows() {
            let scale = vi[r] * inv_s;
            for c in 0..out.ncols() {
                out[(r, c)] += scale * ui[c];
            }
        }
    }
    Ok(out)
}

/// Frobenius norm of a matrix.
pub(crate) fn frobenius(m: &DMatrix<f64>) -> f64 {
    libm::sqrt(m.iter().map(|v| v * v).sum())
}

/// Euclidean norm of a vector slice.
pub(crate) fn norm2(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}

#[allow(dead_code)]
pub(crate) fn to_dvector(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pinv_of_identity_is_identity() {
        let m = DMatrix::<f64>::identity(3, 3);
        let p = pinv(&m, 1e-10).unwrap();
        assert_relative_eq!(frobenius(&(p - m)), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn pinv_solves_least_squares() {
        let m = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let p = pinv(&m, 1e-10).unwrap();
        // p * m should be the 2x2 identity for a full-column-rank matrix
        let prod = &p * &m;
        assert_relative_eq!(frobenius(&(prod - DMatrix::identity(2, 2))), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn pinv_rejects_zero_matrix() {
        let m = DMatrix::<f64>::zeros(4, 3);
        assert!(matches!(pinv(&m, 1e-10), Err(Error::RankDeficient)));
    }

    #[test]
    fn sign_convention_makes_largest_entry_nonnegative() {
        let m = DMatrix::from_row_slice(2, 2, &[-3.0, 0.0, 0.0, 1.0]);
        let (u, s, v) = economy_svd(&m).unwrap();
        assert_relative_eq!(s[0], 3.0, epsilon = 1e-12);
        for j in 0..u.ncols() {
            let best = (0..u.nrows()).max_by(|&a, &b| {
                u[(a, j)].abs().partial_cmp(&u[(b, j)].abs()).unwrap()
            });
            assert!(u[(best.unwrap(), j)] >= 0.0);
        }
        // reconstruction with flipped signs still exact
        let mut rec = DMatrix::<f64>::zeros(2, 2);
        for k in 0..s.len() {
            for i in 0..2 {
                for j in 0..2 {
                    rec[(i, j)] += u[(i, k)] * s[k] * v[(j, k)];
                }
            }
        }
        assert_relative_eq!(frobenius(&(rec - m)), 0.0, epsilon = 1e-12);
    }
}
