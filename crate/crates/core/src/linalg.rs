//! Dense row-major matrices, blocked GEMM and Cholesky solves.
//!
//! Products go through `matrixmultiply::dgemm`, whose summation order
//! depends only on the operand shapes, so results are reproducible across
//! runs on the same build.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{ensure, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

/// Whether an operand enters a product as-is or transposed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    N,
    T,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        ensure!(
            data.len() == rows * cols,
            "matrix data length {} does not match {rows}x{cols}",
            data.len()
        );
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn set_column(&mut self, c: usize, values: &[f64]) {
        assert_eq!(values.len(), self.rows);
        for (r, &v) in values.iter().enumerate() {
            self.set(r, c, v);
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Elementwise combination of two equally shaped matrices.
    pub fn zip_map(&self, other: &Matrix, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.shape(), other.shape(), "zip_map shape mismatch");
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Self {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Matrix) -> Self {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|v| v * s)
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    /// Entrywise l1 norm.
    pub fn l1_norm(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    fn dims_as(&self, op: Op) -> (usize, usize) {
        match op {
            Op::N => (self.rows, self.cols),
            Op::T => (self.cols, self.rows),
        }
    }

    fn strides_as(&self, op: Op) -> (isize, isize) {
        match op {
            Op::N => (self.cols as isize, 1),
            Op::T => (1, self.cols as isize),
        }
    }
}

/// `c ← alpha · op(a) · op(b) + beta · c`.
pub fn gemm_into(
    alpha: f64,
    a: &Matrix,
    op_a: Op,
    b: &Matrix,
    op_b: Op,
    beta: f64,
    c: &mut Matrix,
) {
    let (m, k) = a.dims_as(op_a);
    let (kb, n) = b.dims_as(op_b);
    assert_eq!(k, kb, "inner dimensions differ: {k} vs {kb}");
    assert_eq!(c.shape(), (m, n), "output shape mismatch");
    if m == 0 || n == 0 {
        return;
    }
    if k == 0 {
        c.data.iter_mut().for_each(|v| *v *= beta);
        return;
    }
    let (rsa, csa) = a.strides_as(op_a);
    let (rsb, csb) = b.strides_as(op_b);
    // SAFETY: strides and dims describe exactly the buffers owned by a, b, c,
    // and c does not alias a or b (it is borrowed mutably).
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            alpha,
            a.data.as_ptr(),
            rsa,
            csa,
            b.data.as_ptr(),
            rsb,
            csb,
            beta,
            c.data.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

/// `op(a) · op(b)`.
pub fn matmul(a: &Matrix, op_a: Op, b: &Matrix, op_b: Op) -> Matrix {
    let (m, _) = a.dims_as(op_a);
    let (_, n) = b.dims_as(op_b);
    let mut c = Matrix::zeros(m, n);
    gemm_into(1.0, a, op_a, b, op_b, 0.0, &mut c);
    c
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    lower: Vec<f64>,
}

impl Cholesky {
    pub fn factor(a: &Matrix) -> Result<Self> {
        ensure!(
            a.rows == a.cols,
            "Cholesky needs a square matrix, got {}x{}",
            a.rows,
            a.cols
        );
        let n = a.rows;
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let (done, rest) = l.split_at_mut(j * n);
            let row_j = &mut rest[..n];
            for i in 0..j {
                let row_i = &done[i * n..i * n + i];
                let dot: f64 = row_i.iter().zip(&row_j[..i]).map(|(x, y)| x * y).sum();
                row_j[i] = (a.get(j, i) - dot) / done[i * n + i];
            }
            let diag = a.get(j, j) - row_j[..j].iter().map(|x| x * x).sum::<f64>();
            if diag.is_nan() || diag <= 0.0 || !diag.is_finite() {
                return Err(Error::numeric(
                    0,
                    alloc::format!("matrix not positive definite at pivot {j} (value {diag})"),
                ));
            }
            row_j[j] = libm::sqrt(diag);
        }
        Ok(Self { n, lower: l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `A X = B` in place; `b` is `n × k`.
    pub fn solve_in_place(&self, b: &mut Matrix) {
        let n = self.n;
        assert_eq!(b.rows, n, "rhs rows must equal system size");
        let k = b.cols;
        let l = &self.lower;
        // Forward: L Y = B, row by row.
        for i in 0..n {
            let (before, rest) = b.data.split_at_mut(i * k);
            let row_i = &mut rest[..k];
            for j in 0..i {
                let lij = l[i * n + j];
                if lij != 0.0 {
                    let row_j = &before[j * k..(j + 1) * k];
                    row_i.iter_mut().zip(row_j).for_each(|(x, y)| *x -= lij * y);
                }
            }
            let inv = 1.0 / l[i * n + i];
            row_i.iter_mut().for_each(|x| *x *= inv);
        }
        // Backward: Lᵀ X = Y.
        for i in (0..n).rev() {
            let (head, tail) = b.data.split_at_mut((i + 1) * k);
            let row_i = &mut head[i * k..];
            for j in i + 1..n {
                let lji = l[j * n + i];
                if lji != 0.0 {
                    let row_j = &tail[(j - i - 1) * k..(j - i) * k];
                    row_i.iter_mut().zip(row_j).for_each(|(x, y)| *x -= lji * y);
                }
            }
            let inv = 1.0 / l[i * n + i];
            row_i.iter_mut().for_each(|x| *x *= inv);
        }
    }

    pub fn solve(&self, b: &Matrix) -> Matrix {
        let mut x = b.clone();
        self.solve_in_place(&mut x);
        x
    }
}

/// `a·aᵀ + eps·I` (when `op == Op::N`) or `aᵀ·a + eps·I` (when `op == Op::T`).
pub fn gram_plus_ridge(a: &Matrix, op: Op, eps: f64) -> Matrix {
    let mut g = match op {
        Op::N => matmul(a, Op::N, a, Op::T),
        Op::T => matmul(a, Op::T, a, Op::N),
    };
    let n = g.rows;
    for i in 0..n {
        g.data[i * n + i] += eps;
    }
    // Symmetrize so the factorization sees an exactly symmetric matrix.
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (g.data[i * n + j] + g.data[j * n + i]);
            g.data[i * n + j] = v;
            g.data[j * n + i] = v;
        }
    }
    g
}
