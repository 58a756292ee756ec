//! Closed-form block solvers used by the Split Bregman trainer.

use crate::error::{ensure, Error, Result};
use crate::linalg::{gram_plus_ridge, matmul, Cholesky, Matrix, Op};

/// Which side the unknown multiplies the known factor on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Minimize `‖B − X·A‖_F² + ε‖X‖_F²`.
    Right,
    /// Minimize `‖B − A·X‖_F² + ε‖X‖_F²`.
    Left,
}

/// Ridge-regularized least squares through the normal equations.
pub fn solve_ridge_least_squares(
    a: &Matrix,
    b: &Matrix,
    ridge_eps: f64,
    side: Side,
) -> Result<Matrix> {
    ensure!(
        ridge_eps >= 0.0 && ridge_eps.is_finite(),
        "ridge_eps must be finite and nonnegative"
    );
    match side {
        Side::Right => {
            ensure!(
                a.cols() == b.cols(),
                "X·A ≈ B needs A and B with equal column counts, got {:?} and {:?}",
                a.shape(),
                b.shape()
            );
            let factor = Cholesky::factor(&gram_plus_ridge(a, Op::N, ridge_eps))?;
            Ok(solve_right_with(&factor, a, b))
        }
        Side::Left => {
            ensure!(
                a.rows() == b.rows(),
                "A·X ≈ B needs A and B with equal row counts, got {:?} and {:?}",
                a.shape(),
                b.shape()
            );
            let factor = Cholesky::factor(&gram_plus_ridge(a, Op::T, ridge_eps))?;
            let mut rhs = matmul(a, Op::T, b, Op::N);
            factor.solve_in_place(&mut rhs);
            Ok(rhs)
        }
    }
}

/// `X = B·Aᵀ·(A·Aᵀ + εI)⁻¹` given the factor of `A·Aᵀ + εI`.
pub(crate) fn solve_right_with(factor: &Cholesky, a: &Matrix, b: &Matrix) -> Matrix {
    // (A Aᵀ + εI) Xᵀ = A Bᵀ
    let mut rhs = matmul(a, Op::N, b, Op::T);
    factor.solve_in_place(&mut rhs);
    rhs.transpose()
}

/// Elementwise `sign(v)·max(0, |v| − τ)`.
pub fn soft_threshold(values: &[f64], tau: f64) -> Result<alloc::vec::Vec<f64>> {
    ensure!(tau >= 0.0, "soft threshold needs tau >= 0, got {tau}");
    Ok(values.iter().map(|&v| shrink(v, tau)).collect())
}

#[inline]
pub(crate) fn shrink(v: f64, tau: f64) -> f64 {
    if v > tau {
        v - tau
    } else if v < -tau {
        v + tau
    } else {
        0.0
    }
}

pub(crate) fn soft_threshold_matrix(m: &Matrix, tau: f64) -> Matrix {
    m.map(|v| shrink(v, tau))
}

pub(crate) fn check_finite(m: &Matrix, iteration: usize, what: &str) -> Result<()> {
    if m.is_finite() {
        Ok(())
    } else {
        Err(Error::numeric(
            iteration,
            alloc::format!("non-finite values in {what}"),
        ))
    }
}
