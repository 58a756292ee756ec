//! Euclidean-cost baseline trained with full-batch gradient descent.

use crate::error::{ensure, Error, Result};
use crate::linalg::{gemm_into, matmul, Matrix, Op};

use super::{Activation, AutoencoderModel, TrainingSet};

#[derive(Debug, Clone, PartialEq)]
pub struct L2Config {
    pub hidden: usize,
    pub activation: Activation,
    pub seed: u64,
    pub learning_rate: f64,
    pub epochs: usize,
}

impl Default for L2Config {
    fn default() -> Self {
        Self {
            hidden: 256,
            activation: Activation::Tanh,
            seed: 0,
            learning_rate: 3e-3,
            epochs: 200,
        }
    }
}

/// Loss growth over the initial loss treated as divergence.
pub const DIVERGENCE_FACTOR: f64 = 1e6;

/// Per-sample mean of the squared error, `‖X_out − W_dec φ(W_enc X_in)‖_F² / N`.
pub fn l2_loss(model: &AutoencoderModel, set: &TrainingSet) -> Result<f64> {
    let pred = model.forward_augmented(set.x_in())?;
    Ok(pred.sub(set.x_out()).frobenius_sq() / set.len() as f64)
}

/// Loss and its exact gradients `(∂/∂W_enc, ∂/∂W_dec)`.
pub fn l2_loss_and_gradient(
    model: &AutoencoderModel,
    set: &TrainingSet,
) -> Result<(f64, Matrix, Matrix)> {
    ensure!(
        model.input_dim() == set.input_dim(),
        "model dim {} differs from set dim {}",
        model.input_dim(),
        set.input_dim()
    );
    let scale = 1.0 / set.len() as f64;
    let a = model.encode_augmented(set.x_in())?;
    let mut r = matmul(model.w_dec(), Op::N, &a, Op::N);
    r.data_mut()
        .iter_mut()
        .zip(set.x_out().data())
        .for_each(|(r, x)| *r -= x);
    let loss = r.frobenius_sq() * scale;

    let mut grad_dec = Matrix::zeros(model.w_dec().rows(), model.w_dec().cols());
    gemm_into(2.0 * scale, &r, Op::N, &a, Op::T, 0.0, &mut grad_dec);

    let mut dh = matmul(model.w_dec(), Op::T, &r, Op::N);
    let act = model.activation();
    dh.data_mut()
        .iter_mut()
        .zip(a.data())
        .for_each(|(g, y)| *g *= 2.0 * scale * act.derivative_from_output(*y));
    let grad_enc = matmul(&dh, Op::N, set.x_in(), Op::T);
    Ok((loss, grad_enc, grad_dec))
}

pub fn train_l2_baseline(set: &TrainingSet, config: &L2Config) -> Result<AutoencoderModel> {
    train_l2_baseline_with(set, config, |_, _| true)
}

/// Gradient descent with an observer `(epoch, loss before the step) -> keep_going`.
pub fn train_l2_baseline_with(
    set: &TrainingSet,
    config: &L2Config,
    mut observer: impl FnMut(usize, f64) -> bool,
) -> Result<AutoencoderModel> {
    ensure!(
        config.learning_rate >= 0.0 && config.learning_rate.is_finite(),
        "learning_rate must be finite and nonnegative, got {}",
        config.learning_rate
    );
    ensure!(config.hidden >= 1, "hidden must be at least 1");
    let mut model = AutoencoderModel::init(
        set.input_dim(),
        config.hidden,
        config.activation,
        config.seed,
    )?;
    let mut initial = None;
    for epoch in 0..config.epochs {
        let (loss, g_enc, g_dec) = l2_loss_and_gradient(&model, set)?;
        let start = *initial.get_or_insert(loss);
        if !loss.is_finite() || loss > DIVERGENCE_FACTOR * start.max(f64::MIN_POSITIVE) {
            return Err(Error::numeric(epoch, "l2 baseline diverged"));
        }
        if !observer(epoch, loss) {
            break;
        }
        if config.learning_rate == 0.0 {
            continue;
        }
        let lr = config.learning_rate;
        let w_enc = model.w_enc().zip_map(&g_enc, |w, g| w - lr * g);
        let w_dec = model.w_dec().zip_map(&g_dec, |w, g| w - lr * g);
        if !w_enc.is_finite() || !w_dec.is_finite() {
            return Err(Error::numeric(
                epoch + 1,
                "non-finite weights in l2 baseline",
            ));
        }
        model.set_w_enc(w_enc);
        model.set_w_dec(w_dec);
    }
    Ok(model)
}
