//! Coefficient solve against the G-orthonormalized basis columns.
//!
//! The fitting inner product makes the mapped columns A = L·Q orthonormal,
//! so the least-squares minimizer is c = Aᵀb. A residual-orthogonality
//! check guards the assumption; when it fails (truncated or numerically
//! degraded fits) the system is re-solved densely.

use crate::arnoldi::FitModel;
use crate::colmat::ColMatrix;
use crate::error::{Error, Result};
use crate::scalar::dot_conj;
use nalgebra::{DMatrix, DVector};

use super::LsProblem;

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum SolvePath {
    /// c = Aᵀb, valid for orthonormal columns.
    Orthonormal,
    /// Dense least-squares fallback (SVD).
    DenseLeastSquares,
}

impl SolvePath {
    pub fn name(self) -> &'static str {
        match self {
            SolvePath::Orthonormal => "orthonormal",
            SolvePath::DenseLeastSquares => "dense_least_squares",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub path: SolvePath,
    /// ‖Aᵀ(Ac − b)‖_∞ for the returned coefficients.
    pub residual_orthogonality: f64,
}

/// Solves min ‖Ac − b‖₂ where column j of A is the problem map applied to
/// the model's j-th orthonormal column. Stores the coefficients on the
/// model and reports which path produced them.
pub fn solve_coefficients(
    model: &mut FitModel<f64>,
    problem: &LsProblem,
) -> Result<SolveReport> {
    if problem.rhs.len() != problem.map.num_rows() {
        return Err(Error::RowCountMismatch {
            map_rows: problem.map.num_rows(),
            rhs_len: problem.rhs.len(),
        });
    }
    if *model.map() != problem.map {
        return Err(Error::MapMismatch);
    }
    let q = model.q().ok_or(Error::MissingQ)?;
    let r = problem.map.num_rows();
    let t = model.t();

    let mut a = ColMatrix::<f64>::with_capacity(r, t);
    let mut buf = vec![0.0; r];
    for j in 0..t {
        problem.map.apply_slice_into(q.col(j), &mut buf);
        a.push_col(&buf);
    }

    let b = &problem.rhs;
    let coeffs: Vec<f64> = (0..t).map(|j| dot_conj(a.col(j), b)).collect();
    let orth = residual_orthogonality(&a, &coeffs, b);
    let b_max = b.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));

    if orth <= 1e-8 * b_max {
        model.set_coeffs(coeffs)?;
        return Ok(SolveReport {
            path: SolvePath::Orthonormal,
            residual_orthogonality: orth,
        });
    }

    let dense = DMatrix::from_fn(r, t, |i, j| a.col(j)[i]);
    let rhs = DVector::from_column_slice(b);
    let svd = dense.svd(true, true);
    let solution = svd
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::Internal(format!("dense least-squares solve failed: {e}")))?;
    let coeffs: Vec<f64> = solution.iter().copied().collect();
    let orth = residual_orthogonality(&a, &coeffs, b);
    model.set_coeffs(coeffs)?;
    Ok(SolveReport {
        path: SolvePath::DenseLeastSquares,
        residual_orthogonality: orth,
    })
}

/// ‖Aᵀ(Ac − b)‖_∞.
fn residual_orthogonality(a: &ColMatrix<f64>, coeffs: &[f64], b: &[f64]) -> f64 {
    let r = a.nrows();
    let mut residual = vec![0.0; r];
    residual.copy_from_slice(b);
    for (j, &c) in coeffs.iter().enumerate() {
        let col = a.col(j);
        for i in 0..r {
            residual[i] -= col[i] * c;
        }
    }
    let mut worst = 0.0f64;
    for j in 0..coeffs.len() {
        worst = worst.max(dot_conj(a.col(j), &residual).abs());
    }
    worst
}
