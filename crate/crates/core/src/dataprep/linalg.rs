//! Symmetric eigen-decomposition and Cholesky on small dense matrices, via nalgebra.

use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Eigen-decomposition of a symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymEigen {
    /// Descending.
    pub values: Vec<f64>,
    /// `vectors[k]` is the unit eigenvector of `values[k]`, largest-magnitude entry positive.
    pub vectors: Vec<Vec<f64>>,
}

fn to_dmatrix(matrix: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = matrix.len();
    if matrix.iter().any(|r| r.len() != n) {
        return Err(Error::Numeric("expected a square matrix".into()));
    }
    if matrix.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::Numeric("matrix has non-finite entries".into()));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| matrix[i][j]))
}

pub fn symmetric_eigen(matrix: &[Vec<f64>]) -> Result<SymEigen> {
    let m = to_dmatrix(matrix)?;
    let n = m.nrows();
    for i in 0..n {
        for j in 0..i {
            let (a, b) = (m[(i, j)], m[(j, i)]);
            if (a - b).abs() > 1e-9 * (1.0 + a.abs().max(b.abs())) {
                return Err(Error::Numeric(format!("matrix not symmetric at ({i}, {j})")));
            }
        }
    }
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]).then(i.cmp(&j)));
    Ok(SymEigen {
        values: order.iter().map(|&k| eig.eigenvalues[k]).collect(),
        vectors: order
            .iter()
            .map(|&k| orient(eig.eigenvectors.column(k).iter().copied().collect()))
            .collect(),
    })
}

/// Flips the sign so the largest-magnitude entry is positive.
fn orient(mut vec: Vec<f64>) -> Vec<f64> {
    let mut best = 0;
    for (i, x) in vec.iter().enumerate() {
        if x.abs() > vec[best].abs() + 1e-12 {
            best = i;
        }
    }
    if vec.get(best).is_some_and(|&x| x < 0.0) {
        vec.iter_mut().for_each(|x| *x = -*x);
    }
    vec
}

/// Lower-triangular `L` with `L Lᵀ = matrix`.
pub fn cholesky(matrix: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let m = to_dmatrix(matrix)?;
    let n = m.nrows();
    let l = m
        .cholesky()
        .ok_or_else(|| Error::Numeric("covariance is not positive definite".into()))?
        .l();
    Ok((0..n).map(|i| (0..n).map(|j| l[(i, j)]).collect()).collect())
}
