use alloc::vec::Vec;

use crate::error::{ensure, Result};
use crate::linalg::{matmul, Matrix, Op};
use crate::rng::SeededRng;

use super::Activation;

/// Single-hidden-layer autoencoder `x ↦ W_dec · φ(W_enc · [x; 1])`.
#[derive(Debug, Clone, PartialEq)]
pub struct AutoencoderModel {
    w_enc: Matrix,
    w_dec: Matrix,
    activation: Activation,
}

impl AutoencoderModel {
    /// `w_enc` is `hidden × (d + 1)` (last column multiplies the bias input),
    /// `w_dec` is `d × hidden`.
    pub fn new(w_enc: Matrix, w_dec: Matrix, activation: Activation) -> Result<Self> {
        ensure!(
            w_enc.rows() > 0 && w_enc.cols() > 1,
            "encoder must be hidden x (d+1) with d >= 1"
        );
        ensure!(
            w_dec.shape() == (w_enc.cols() - 1, w_enc.rows()),
            "decoder shape {:?} inconsistent with encoder {:?}",
            w_dec.shape(),
            w_enc.shape()
        );
        ensure!(
            w_enc.is_finite() && w_dec.is_finite(),
            "weights must be finite"
        );
        Ok(Self {
            w_enc,
            w_dec,
            activation,
        })
    }

    /// Seeded Gaussian weights with standard deviation `1/√fan_in`.
    pub fn init(
        input_dim: usize,
        hidden: usize,
        activation: Activation,
        seed: u64,
    ) -> Result<Self> {
        ensure!(
            input_dim >= 1 && hidden >= 1,
            "input_dim and hidden must be positive"
        );
        let mut rng = SeededRng::new(seed);
        let enc_scale = 1.0 / libm::sqrt((input_dim + 1) as f64);
        let w_enc = Matrix::from_fn(hidden, input_dim + 1, |_, _| enc_scale * rng.normal());
        let dec_scale = 1.0 / libm::sqrt(hidden as f64);
        let w_dec = Matrix::from_fn(input_dim, hidden, |_, _| dec_scale * rng.normal());
        Self::new(w_enc, w_dec, activation)
    }

    pub fn input_dim(&self) -> usize {
        self.w_dec.rows()
    }

    pub fn hidden(&self) -> usize {
        self.w_enc.rows()
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn w_enc(&self) -> &Matrix {
        &self.w_enc
    }

    pub fn w_dec(&self) -> &Matrix {
        &self.w_dec
    }

    pub(crate) fn set_w_enc(&mut self, w: Matrix) {
        debug_assert_eq!(w.shape(), self.w_enc.shape());
        self.w_enc = w;
    }

    pub(crate) fn set_w_dec(&mut self, w: Matrix) {
        debug_assert_eq!(w.shape(), self.w_dec.shape());
        self.w_dec = w;
    }

    /// `φ(W_enc · X_in)` for bias-augmented inputs.
    pub fn encode_augmented(&self, x_in: &Matrix) -> Result<Matrix> {
        ensure!(
            x_in.rows() == self.w_enc.cols(),
            "augmented input has {} rows, expected {}",
            x_in.rows(),
            self.w_enc.cols()
        );
        Ok(self
            .activation
            .apply_matrix(&matmul(&self.w_enc, Op::N, x_in, Op::N)))
    }

    /// Forward pass on bias-augmented columns (`(d + 1) × N`).
    pub fn forward_augmented(&self, x_in: &Matrix) -> Result<Matrix> {
        let z = self.encode_augmented(x_in)?;
        Ok(matmul(&self.w_dec, Op::N, &z, Op::N))
    }

    /// Forward pass on raw columns (`d × N`); the bias row is appended here.
    pub fn forward_batch(&self, x: &Matrix) -> Result<Matrix> {
        ensure!(
            x.rows() == self.input_dim(),
            "input has {} rows, model expects {}",
            x.rows(),
            self.input_dim()
        );
        ensure!(x.is_finite(), "input contains non-finite values");
        self.forward_augmented(&append_bias_row(x))
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        let col = Matrix::from_vec(x.len(), 1, x.to_vec())?;
        Ok(self.forward_batch(&col)?.into_data())
    }
}

/// Stacks a row of ones under `x`.
pub fn append_bias_row(x: &Matrix) -> Matrix {
    let (d, n) = x.shape();
    let mut data = Vec::with_capacity((d + 1) * n);
    data.extend_from_slice(x.data());
    data.extend(core::iter::repeat_n(1.0, n));
    Matrix::from_vec(d + 1, n, data).expect("shape arithmetic")
}

/// Column-paired training data: bias-augmented inputs and targets.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    x_in: Matrix,
    x_out: Matrix,
}

impl TrainingSet {
    /// `x_in` is `(d + 1) × N` with a bottom row of exact ones; `x_out` is `d × N`.
    pub fn new(x_in: Matrix, x_out: Matrix) -> Result<Self> {
        let (rows, n) = x_in.shape();
        ensure!(n >= 1, "training set needs at least one sample");
        ensure!(
            rows >= 2,
            "inputs need at least one feature row plus the bias row"
        );
        ensure!(
            x_out.shape() == (rows - 1, n),
            "targets {:?} do not pair with inputs {:?}",
            x_out.shape(),
            x_in.shape()
        );
        ensure!(
            x_in.row(rows - 1).iter().all(|&v| v == 1.0),
            "bias row must be exactly 1"
        );
        ensure!(
            x_in.is_finite() && x_out.is_finite(),
            "training data must be finite"
        );
        Ok(Self { x_in, x_out })
    }

    /// Pairs raw `d × N` inputs with `d × N` targets, appending the bias row.
    pub fn from_pairs(inputs: &Matrix, targets: &Matrix) -> Result<Self> {
        ensure!(
            inputs.shape() == targets.shape(),
            "inputs {:?} and targets {:?} differ in shape",
            inputs.shape(),
            targets.shape()
        );
        Self::new(append_bias_row(inputs), targets.clone())
    }

    pub fn input_dim(&self) -> usize {
        self.x_out.rows()
    }

    pub fn len(&self) -> usize {
        self.x_out.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn x_in(&self) -> &Matrix {
        &self.x_in
    }

    pub fn x_out(&self) -> &Matrix {
        &self.x_out
    }
}

/// Entrywise `Σ |X_out − W_dec φ(W_enc X_in)|`.
pub fn objective_l1(model: &AutoencoderModel, set: &TrainingSet) -> Result<f64> {
    ensure!(
        model.input_dim() == set.input_dim(),
        "model dim {} differs from set dim {}",
        model.input_dim(),
        set.input_dim()
    );
    let pred = model.forward_augmented(set.x_in())?;
    Ok(set.x_out().sub(&pred).l1_norm())
}
