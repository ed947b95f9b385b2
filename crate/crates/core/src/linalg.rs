//! Least squares restricted to a subset of columns.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result, C64};

/// Singular values below `RCOND` times the largest are treated as zero.
pub const RCOND: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SupportFit {
    /// Coefficients aligned with the requested support order.
    pub coeffs: Vec<C64>,
    pub residual: DVector<C64>,
    pub residual_norm: f64,
    /// The restricted matrix had numerical rank below `|support|`; `coeffs`
    /// is then the minimum-norm minimizer.
    pub rank_deficient: bool,
}

/// Columns of `matrix` listed in `support`, in that order.
pub fn select_columns(matrix: &DMatrix<C64>, support: &[usize]) -> DMatrix<C64> {
    DMatrix::from_fn(matrix.nrows(), support.len(), |i, j| {
        matrix[(i, support[j])]
    })
}

/// `argmin_c || rhs - A_S c ||_2` via the SVD of `A_S`.
pub fn least_squares_on_support(
    matrix: &DMatrix<C64>,
    rhs: &DVector<C64>,
    support: &[usize],
) -> Result<SupportFit> {
    if rhs.len() != matrix.nrows() {
        return Err(Error::Dimension(format!(
            "rhs has {} entries but matrix has {} rows",
            rhs.len(),
            matrix.nrows()
        )));
    }
    if let Some(&bad) = support.iter().find(|&&j| j >= matrix.ncols()) {
        return Err(Error::Dimension(format!(
            "support index {bad} out of range for {} columns",
            matrix.ncols()
        )));
    }
    if support.is_empty() {
        return Ok(SupportFit {
            coeffs: Vec::new(),
            residual: rhs.clone(),
            residual_norm: rhs.norm(),
            rank_deficient: false,
        });
    }

    let a = select_columns(matrix, support);
    let s = support.len();
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = RCOND * smax;
    let rank = svd.singular_values.iter().filter(|&&v| v > eps).count();

    let coeffs: Vec<C64> = if smax == 0.0 {
        vec![C64::new(0.0, 0.0); s]
    } else {
        svd.solve(rhs, eps)
            .map_err(|e| Error::Dimension(e.to_string()))?
            .iter()
            .copied()
            .collect()
    };
    let residual = rhs - &a * DVector::from_column_slice(&coeffs);
    let residual_norm = residual.norm();
    Ok(SupportFit {
        coeffs,
        residual,
        residual_norm,
        rank_deficient: rank < s,
    })
}
