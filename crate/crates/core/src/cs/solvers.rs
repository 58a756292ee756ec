use alloc::vec;
use alloc::vec::Vec;

use crate::autoencoder::{soft_threshold, solve_ridge_least_squares, Side};
use crate::error::{ensure, Error, Result};
use crate::linalg::Matrix;

use super::operator::{dot, max_eigenvalue, norm, LinearOperator};

/// Power-iteration length and safety margin used for the ISTA step size.
pub const POWER_ITERATIONS: usize = 100;
pub const STEP_MARGIN: f64 = 0.95;

#[derive(Debug, Clone, PartialEq)]
pub struct CsSolveReport {
    pub solution: Vec<f64>,
    pub iterations: usize,
    pub final_objective: f64,
    pub residual_norm: f64,
    /// Indices of the nonzero solution entries, ascending (OMP: selection order).
    pub support: Vec<usize>,
    pub objective_history: Vec<f64>,
}

/// `‖y − Ax‖₂² + λ‖x‖₁`.
pub fn lasso_objective(op: &LinearOperator, y: &[f64], x: &[f64], lambda: f64) -> Result<f64> {
    let r = residual(op, y, x)?;
    Ok(dot(&r, &r) + lambda * x.iter().map(|v| v.abs()).sum::<f64>())
}

fn residual(op: &LinearOperator, y: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    let ax = op.apply(x)?;
    Ok(y.iter().zip(&ax).map(|(a, b)| a - b).collect())
}

/// ISTA with step `σ = 0.95 / λ_max(AᵀA)`.
pub fn ista_solve(
    op: &LinearOperator,
    y: &[f64],
    lambda: f64,
    max_iter: usize,
    tol: f64,
) -> Result<CsSolveReport> {
    let l_max = max_eigenvalue(op, POWER_ITERATIONS, 0)?;
    ensure!(l_max > 0.0, "operator is zero; ISTA step is undefined");
    ista_solve_with_step(op, y, lambda, max_iter, tol, STEP_MARGIN / l_max, None)
}

/// ISTA with an explicit step size and optional warm start.
///
/// Iterates `b = x + σAᵀ(y − Ax)`, `x ← soft_threshold(b, λσ/2)` until the
/// relative change of `x` drops below `tol` or `max_iter` is reached.
pub fn ista_solve_with_step(
    op: &LinearOperator,
    y: &[f64],
    lambda: f64,
    max_iter: usize,
    tol: f64,
    sigma: f64,
    start: Option<&[f64]>,
) -> Result<CsSolveReport> {
    ensure!(
        lambda >= 0.0 && lambda.is_finite(),
        "lambda must be finite and nonnegative, got {lambda}"
    );
    ensure!(
        sigma > 0.0 && sigma.is_finite(),
        "step size must be positive, got {sigma}"
    );
    ensure!(
        y.len() == op.out_dim(),
        "measurement length {} does not match operator ({})",
        y.len(),
        op.out_dim()
    );
    let mut x = match start {
        Some(s) => {
            ensure!(
                s.len() == op.in_dim(),
                "warm start has length {}, expected {}",
                s.len(),
                op.in_dim()
            );
            s.to_vec()
        }
        None => vec![0.0; op.in_dim()],
    };
    let tau = lambda * sigma / 2.0;
    let mut history = Vec::new();
    let mut r = residual(op, y, &x)?;
    let mut iterations = 0;
    for it in 0..max_iter {
        let g = op.adjoint(&r)?;
        let b: Vec<f64> = x.iter().zip(&g).map(|(x, g)| x + sigma * g).collect();
        let next = soft_threshold(&b, tau)?;
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::numeric(it + 1, "non-finite ISTA iterate"));
        }
        let change = libm::sqrt(
            next.iter()
                .zip(&x)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>(),
        );
        let scale = norm(&next);
        x = next;
        r = residual(op, y, &x)?;
        history.push(dot(&r, &r) + lambda * x.iter().map(|v| v.abs()).sum::<f64>());
        iterations = it + 1;
        if change <= tol * scale.max(f64::MIN_POSITIVE) {
            break;
        }
    }
    let residual_norm = norm(&r);
    let final_objective = match history.last() {
        Some(&v) => v,
        None => residual_norm * residual_norm + lambda * x.iter().map(|v| v.abs()).sum::<f64>(),
    };
    let support = x
        .iter()
        .enumerate()
        .filter_map(|(i, &v)| (v != 0.0).then_some(i))
        .collect();
    Ok(CsSolveReport {
        solution: x,
        iterations,
        final_objective,
        residual_norm,
        support,
        objective_history: history,
    })
}

/// Ridge used in the restricted least-squares refit.
pub const OMP_RIDGE: f64 = 1e-10;

/// Orthogonal matching pursuit with exactly `k` greedy selections.
pub fn omp_solve(a: &Matrix, y: &[f64], k: usize) -> Result<CsSolveReport> {
    let (m, n) = a.shape();
    ensure!(
        y.len() == m,
        "measurement length {} does not match {m} rows",
        y.len()
    );
    ensure!(k <= m.min(n), "k = {k} exceeds min(m, n) = {}", m.min(n));
    for c in 0..n {
        ensure!(
            a.column(c).iter().any(|&v| v != 0.0),
            "column {c} of A is zero"
        );
    }
    let op = LinearOperator::Explicit(a.clone());
    let mut support: Vec<usize> = Vec::with_capacity(k);
    let mut chosen = vec![false; n];
    let mut r = y.to_vec();
    let mut x = vec![0.0; n];
    let mut history = Vec::with_capacity(k);
    for it in 0..k {
        let c = op.adjoint(&r)?;
        let mut best = None;
        for (j, v) in c.iter().enumerate() {
            if chosen[j] {
                continue;
            }
            let v = v.abs();
            match best {
                Some((_, bv)) if v <= bv => {}
                _ => best = Some((j, v)),
            }
        }
        let (j, _) = best.expect("k <= n leaves a free column");
        chosen[j] = true;
        support.push(j);
        let sub = Matrix::from_fn(m, support.len(), |r, c| a.get(r, support[c]));
        let rhs = Matrix::from_vec(m, 1, y.to_vec())?;
        let coef = solve_ridge_least_squares(&sub, &rhs, OMP_RIDGE, Side::Left)?;
        x.iter_mut().for_each(|v| *v = 0.0);
        for (i, &s) in support.iter().enumerate() {
            x[s] = coef.get(i, 0);
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::numeric(it + 1, "non-finite OMP coefficients"));
        }
        r = residual(&op, y, &x)?;
        history.push(norm(&r));
    }
    let residual_norm = norm(&r);
    Ok(CsSolveReport {
        solution: x,
        iterations: k,
        final_objective: residual_norm * residual_norm,
        residual_norm,
        support,
        objective_history: history,
    })
}
