//! Split Bregman training of the l1-cost autoencoder.
//!
//! The l1 fit `min ‖X_out − W_dec φ(W_enc X_in)‖₁` is split with
//! `P = X_out − W_dec Z` and `Z = φ(W_enc X_in)`, giving the relaxed objective
//!
//! ```text
//! J = ‖P‖₁ + λ‖P − (X_out − W_dec Z) − B1‖² + μ‖Z − φ(W_enc X_in) − B2‖²
//! ```
//!
//! Each cycle minimizes `J` block by block (P, W_enc, W_dec, Z) and then
//! updates the Bregman variables `B1`, `B2`.

use alloc::vec::Vec;

use crate::error::{ensure, Error, Result};
use crate::linalg::{gram_plus_ridge, matmul, Cholesky, Matrix, Op};

use super::ridge::{
    check_finite, soft_threshold_matrix, solve_ridge_least_squares, solve_right_with, Side,
};
use super::{Activation, AutoencoderModel, TrainingSet};

/// How `B1`, `B2` are refreshed after each cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BregmanUpdate {
    /// `B1 ← P − (X_out − W_dec Z) − B1`, `B2 ← Z − φ(W_enc X_in) − B2`.
    #[default]
    PaperLiteral,
    /// `B1 ← B1 + (X_out − W_dec Z − P)`, `B2 ← B2 + (φ(W_enc X_in) − Z)`.
    Additive,
}

/// How the hidden codes `Z` are refreshed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CodeUpdate {
    /// Exact minimizer of `J` over `Z` (both the λ and μ terms).
    #[default]
    Coupled,
    /// `Z ← φ(W_enc X_in) + B2`, ignoring the λ term.
    PaperLiteral,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub hidden: usize,
    pub lambda: f64,
    pub mu: f64,
    pub max_iter: usize,
    pub rel_tol: f64,
    pub ridge_eps: f64,
    pub activation: Activation,
    pub atanh_clamp_eps: f64,
    pub bregman_update: BregmanUpdate,
    pub p4: CodeUpdate,
    pub seed: u64,
    pub encoder_guard: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            hidden: 256,
            lambda: 1.0,
            mu: 1.0,
            max_iter: 500,
            rel_tol: 1e-4,
            ridge_eps: 1e-6,
            activation: Activation::Tanh,
            atanh_clamp_eps: 1e-6,
            bregman_update: BregmanUpdate::PaperLiteral,
            p4: CodeUpdate::Coupled,
            seed: 0,
            encoder_guard: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        ensure!(self.hidden >= 1, "hidden must be at least 1");
        ensure!(
            self.lambda > 0.0 && self.lambda.is_finite(),
            "lambda must be positive and finite"
        );
        ensure!(
            self.mu > 0.0 && self.mu.is_finite(),
            "mu must be positive and finite"
        );
        ensure!(self.max_iter >= 1, "max_iter must be at least 1");
        ensure!(self.rel_tol > 0.0, "rel_tol must be positive");
        ensure!(
            self.ridge_eps > 0.0 && self.ridge_eps.is_finite(),
            "ridge_eps must be positive and finite"
        );
        ensure!(
            self.atanh_clamp_eps > 0.0 && self.atanh_clamp_eps < 0.5,
            "atanh_clamp_eps must lie in (0, 0.5)"
        );
        Ok(())
    }
}

/// Number of consecutive small relative changes that ends training.
pub const STOPPING_WINDOW: usize = 5;

/// Split variables, Bregman variables and bookkeeping for one training run.
///
/// A state is tied to the model and training set it was initialized with;
/// it caches `φ(W_enc X_in)`, `W_dec Z` and the factorization of the input
/// Gram matrix. Call [`SplitBregmanState::refresh`] after editing the model
/// by hand.
#[derive(Debug, Clone)]
pub struct SplitBregmanState {
    p: Matrix,
    z: Matrix,
    b1: Matrix,
    b2: Matrix,
    lambda: f64,
    mu: f64,
    iteration: usize,
    objective_history: Vec<f64>,
    initial_objective: f64,
    encoded: Matrix,
    decoded: Matrix,
    input_factor: Option<Cholesky>,
    encoder_fallbacks: usize,
    encoder_step: f64,
}

/// `J` at the start of a cycle and after each block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockTrace {
    pub start: f64,
    pub after_p1: f64,
    pub after_p2: f64,
    pub after_p3: f64,
    pub after_p4: f64,
}

impl BlockTrace {
    pub fn sequence(&self) -> [f64; 5] {
        [
            self.start,
            self.after_p1,
            self.after_p2,
            self.after_p3,
            self.after_p4,
        ]
    }
}

impl SplitBregmanState {
    /// `Z ← φ(W_enc X_in)`, `P ← X_out − W_dec Z`, `B1 = B2 = 0`.
    pub fn init(model: &AutoencoderModel, set: &TrainingSet, config: &TrainConfig) -> Result<Self> {
        ensure!(
            model.input_dim() == set.input_dim(),
            "model dim {} differs from training set dim {}",
            model.input_dim(),
            set.input_dim()
        );
        let encoded = model.encode_augmented(set.x_in())?;
        let z = encoded.clone();
        let decoded = matmul(model.w_dec(), Op::N, &z, Op::N);
        let p = set.x_out().sub(&decoded);
        let (d, n, h) = (set.input_dim(), set.len(), model.hidden());
        let mut state = Self {
            p,
            z,
            b1: Matrix::zeros(d, n),
            b2: Matrix::zeros(h, n),
            lambda: config.lambda,
            mu: config.mu,
            iteration: 0,
            objective_history: Vec::new(),
            initial_objective: 0.0,
            encoded,
            decoded,
            input_factor: None,
            encoder_fallbacks: 0,
            encoder_step: 0.0,
        };
        state.initial_objective = state.cached_objective(set);
        check_finite_scalar(state.initial_objective, 0)?;
        Ok(state)
    }

    /// Recomputes the cached products after the model was changed externally.
    pub fn refresh(&mut self, model: &AutoencoderModel, set: &TrainingSet) -> Result<()> {
        self.encoded = model.encode_augmented(set.x_in())?;
        self.decoded = matmul(model.w_dec(), Op::N, &self.z, Op::N);
        Ok(())
    }

    pub fn p(&self) -> &Matrix {
        &self.p
    }

    pub fn z(&self) -> &Matrix {
        &self.z
    }

    pub fn b1(&self) -> &Matrix {
        &self.b1
    }

    pub fn b2(&self) -> &Matrix {
        &self.b2
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    /// `J` recorded after the block updates of every completed cycle.
    pub fn objective_history(&self) -> &[f64] {
        &self.objective_history
    }

    /// `J` at initialization (equal to the l1 objective, since `P` is exact and `B = 0`).
    pub fn initial_objective(&self) -> f64 {
        self.initial_objective
    }

    /// How many least-squares encoder fits were rejected for raising `J`.
    pub fn encoder_fallbacks(&self) -> usize {
        self.encoder_fallbacks
    }

    fn cached_objective(&self, set: &TrainingSet) -> f64 {
        let mut fit = 0.0;
        for (((p, x), d), b) in self
            .p
            .data()
            .iter()
            .zip(set.x_out().data())
            .zip(self.decoded.data())
            .zip(self.b1.data())
        {
            let r = p - (x - d) - b;
            fit += r * r;
        }
        self.p.l1_norm() + self.lambda * fit + self.mu * self.code_misfit(&self.encoded)
    }

    /// `‖Z − encoded − B2‖²`.
    fn code_misfit(&self, encoded: &Matrix) -> f64 {
        self.z
            .data()
            .iter()
            .zip(encoded.data())
            .zip(self.b2.data())
            .map(|((z, e), b)| {
                let r = z - e - b;
                r * r
            })
            .sum()
    }

    /// `‖P − V‖` target for the residual block: `V = X_out − W_dec Z + B1`.
    fn residual_target(&self, set: &TrainingSet) -> Matrix {
        let mut v = set.x_out().sub(&self.decoded);
        v.data_mut()
            .iter_mut()
            .zip(self.b1.data())
            .for_each(|(v, b)| *v += b);
        v
    }

    /// `X_out − P + B1`, the decoder/code fitting target.
    fn decoder_target(&self, set: &TrainingSet) -> Matrix {
        let mut t = set.x_out().sub(&self.p);
        t.data_mut()
            .iter_mut()
            .zip(self.b1.data())
            .for_each(|(t, b)| *t += b);
        t
    }
}

fn check_finite_scalar(v: f64, iteration: usize) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::numeric(iteration, "objective is not finite"))
    }
}

/// `J` evaluated from scratch (no cached products).
pub fn relaxed_objective(
    model: &AutoencoderModel,
    set: &TrainingSet,
    state: &SplitBregmanState,
) -> Result<f64> {
    let encoded = model.encode_augmented(set.x_in())?;
    let decoded = matmul(model.w_dec(), Op::N, &state.z, Op::N);
    let fit = state
        .p
        .sub(&set.x_out().sub(&decoded))
        .sub(&state.b1)
        .frobenius_sq();
    let codes = state.z.sub(&encoded).sub(&state.b2).frobenius_sq();
    Ok(state.p.l1_norm() + state.lambda * fit + state.mu * codes)
}

/// P1: `P ← soft_threshold(X_out − W_dec Z + B1, 1/(2λ))`.
pub fn update_residual(set: &TrainingSet, state: &mut SplitBregmanState) -> Result<()> {
    let v = state.residual_target(set);
    state.p = soft_threshold_matrix(&v, 1.0 / (2.0 * state.lambda));
    check_finite(&state.p, state.iteration + 1, "P")
}

/// P2: least-squares fit of `W_enc X_in` to `φ⁻¹(Z − B2)`.
///
/// The linearized fit is not the exact minimizer of the μ-term of `J`. With
/// `encoder_guard` set, a fit that would raise that term is rejected and a
/// backtracked gradient step on the μ-term is taken instead, so `J` never
/// increases in this block.
pub fn update_encoder(
    model: &mut AutoencoderModel,
    set: &TrainingSet,
    state: &mut SplitBregmanState,
    config: &TrainConfig,
) -> Result<()> {
    let iteration = state.iteration + 1;
    if state.input_factor.is_none() {
        let gram = gram_plus_ridge(set.x_in(), Op::N, config.ridge_eps);
        state.input_factor = Some(Cholesky::factor(&gram).map_err(|_| {
            Error::numeric(iteration, "input Gram matrix is not positive definite")
        })?);
    }
    let eps = config.atanh_clamp_eps;
    let activation = model.activation();
    let target = state
        .z
        .zip_map(&state.b2, |z, b| activation.invert(z - b, eps));
    let candidate = solve_right_with(
        state.input_factor.as_ref().expect("factor set above"),
        set.x_in(),
        &target,
    );
    check_finite(&candidate, iteration, "W_enc")?;

    let encoded = activation.apply_matrix(&matmul(&candidate, Op::N, set.x_in(), Op::N));
    let old_misfit = state.code_misfit(&state.encoded);
    if !config.encoder_guard || state.code_misfit(&encoded) <= old_misfit {
        model.set_w_enc(candidate);
        state.encoded = encoded;
        return Ok(());
    }
    state.encoder_fallbacks += 1;
    encoder_gradient_step(model, set, state, old_misfit);
    Ok(())
}

/// Backtracked descent on `‖Z − B2 − φ(W_enc X_in)‖²` with a step size that
/// carries over between calls.
fn encoder_gradient_step(
    model: &mut AutoencoderModel,
    set: &TrainingSet,
    state: &mut SplitBregmanState,
    old_misfit: f64,
) {
    let activation = model.activation();
    // dH = (φ(H) − (Z − B2)) ⊙ φ'(H), gradient = 2 dH X_inᵀ
    let mut dh = state.encoded.clone();
    for (((g, z), b), y) in dh
        .data_mut()
        .iter_mut()
        .zip(state.z.data())
        .zip(state.b2.data())
        .zip(state.encoded.data())
    {
        *g = 2.0 * (y - (z - b)) * activation.derivative_from_output(*y);
    }
    let grad = matmul(&dh, Op::N, set.x_in(), Op::T);
    let grad_sq = grad.frobenius_sq();
    if grad_sq == 0.0 || !grad_sq.is_finite() {
        return;
    }
    if state.encoder_step <= 0.0 {
        state.encoder_step = 1.0 / (2.0 * set.x_in().frobenius_sq());
    }
    let mut step = 2.0 * state.encoder_step;
    for _ in 0..40 {
        let trial = model.w_enc().zip_map(&grad, |w, g| w - step * g);
        let encoded = activation.apply_matrix(&matmul(&trial, Op::N, set.x_in(), Op::N));
        // Armijo condition
        if state.code_misfit(&encoded) <= old_misfit - 1e-4 * step * grad_sq {
            model.set_w_enc(trial);
            state.encoded = encoded;
            state.encoder_step = step;
            return;
        }
        step *= 0.5;
    }
}

/// P3: `W_dec ← argmin ‖(X_out − P + B1) − W_dec Z‖² + ε‖W_dec‖²`.
pub fn update_decoder(
    model: &mut AutoencoderModel,
    set: &TrainingSet,
    state: &mut SplitBregmanState,
    config: &TrainConfig,
) -> Result<()> {
    let target = state.decoder_target(set);
    let w_dec = solve_ridge_least_squares(&state.z, &target, config.ridge_eps, Side::Right)
        .map_err(|e| Error::numeric(state.iteration + 1, alloc::format!("decoder solve: {e}")))?;
    check_finite(&w_dec, state.iteration + 1, "W_dec")?;
    state.decoded = matmul(&w_dec, Op::N, &state.z, Op::N);
    model.set_w_dec(w_dec);
    Ok(())
}

/// P4: refresh the hidden codes `Z`.
///
/// Coupled form solves `(λ W_decᵀ W_dec + μ I) Z = λ W_decᵀ (X_out − P + B1) + μ (φ(W_enc X_in) + B2)`;
/// `μ > 0` keeps the system positive definite without extra ridge.
pub fn update_codes(
    model: &AutoencoderModel,
    set: &TrainingSet,
    state: &mut SplitBregmanState,
    config: &TrainConfig,
) -> Result<()> {
    let iteration = state.iteration + 1;
    let anchor = state.encoded.add(&state.b2);
    state.z = match config.p4 {
        CodeUpdate::PaperLiteral => anchor,
        CodeUpdate::Coupled => {
            let (lambda, mu) = (state.lambda, state.mu);
            let w_dec = model.w_dec();
            let mut system = matmul(w_dec, Op::T, w_dec, Op::N).scale(lambda);
            let h = system.rows();
            for i in 0..h {
                let v = system.get(i, i) + mu;
                system.set(i, i, v);
            }
            let target = state.decoder_target(set);
            let mut rhs = matmul(w_dec, Op::T, &target, Op::N).scale(lambda);
            rhs.data_mut()
                .iter_mut()
                .zip(anchor.data())
                .for_each(|(r, a)| *r += mu * a);
            let factor = Cholesky::factor(&system)
                .map_err(|_| Error::numeric(iteration, "code system is not positive definite"))?;
            factor.solve_in_place(&mut rhs);
            rhs
        }
    };
    check_finite(&state.z, iteration, "Z")?;
    state.decoded = matmul(model.w_dec(), Op::N, &state.z, Op::N);
    Ok(())
}

/// Bregman variable refresh (see [`BregmanUpdate`]).
pub fn update_bregman(
    set: &TrainingSet,
    state: &mut SplitBregmanState,
    config: &TrainConfig,
) -> Result<()> {
    let x_out = set.x_out();
    match config.bregman_update {
        BregmanUpdate::PaperLiteral => {
            for (((b, p), x), d) in state
                .b1
                .data_mut()
                .iter_mut()
                .zip(state.p.data())
                .zip(x_out.data())
                .zip(state.decoded.data())
            {
                *b = p - (x - d) - *b;
            }
            for ((b, z), e) in state
                .b2
                .data_mut()
                .iter_mut()
                .zip(state.z.data())
                .zip(state.encoded.data())
            {
                *b = z - e - *b;
            }
        }
        BregmanUpdate::Additive => {
            for (((b, p), x), d) in state
                .b1
                .data_mut()
                .iter_mut()
                .zip(state.p.data())
                .zip(x_out.data())
                .zip(state.decoded.data())
            {
                *b += (x - d) - p;
            }
            for ((b, z), e) in state
                .b2
                .data_mut()
                .iter_mut()
                .zip(state.z.data())
                .zip(state.encoded.data())
            {
                *b += e - z;
            }
        }
    }
    check_finite(&state.b1, state.iteration + 1, "B1")?;
    check_finite(&state.b2, state.iteration + 1, "B2")
}

fn run_step(
    model: &mut AutoencoderModel,
    set: &TrainingSet,
    state: &mut SplitBregmanState,
    config: &TrainConfig,
    trace: bool,
) -> Result<Option<BlockTrace>> {
    ensure!(
        state.p.shape() == set.x_out().shape()
            && state.z.shape() == (model.hidden(), set.len())
            && state.b1.shape() == state.p.shape()
            && state.b2.shape() == state.z.shape(),
        "split Bregman state does not match model and training set"
    );
    let record = |state: &SplitBregmanState| {
        if trace {
            state.cached_objective(set)
        } else {
            0.0
        }
    };
    let start = record(state);
    update_residual(set, state)?;
    let after_p1 = record(state);
    update_encoder(model, set, state, config)?;
    let after_p2 = record(state);
    update_decoder(model, set, state, config)?;
    let after_p3 = record(state);
    update_codes(model, set, state, config)?;
    let objective = state.cached_objective(set);
    check_finite_scalar(objective, state.iteration + 1)?;
    state.objective_history.push(objective);
    update_bregman(set, state, config)?;
    state.iteration += 1;
    Ok(trace.then_some(BlockTrace {
        start,
        after_p1,
        after_p2,
        after_p3,
        after_p4: objective,
    }))
}

/// One full cycle P1 → P2 → P3 → P4 → Bregman update; returns the recorded `J`.
pub fn split_bregman_step(
    model: &mut AutoencoderModel,
    set: &TrainingSet,
    state: &mut SplitBregmanState,
    config: &TrainConfig,
) -> Result<f64> {
    run_step(model, set, state, config, false)?;
    Ok(*state
        .objective_history
        .last()
        .expect("step pushed an objective"))
}

/// Like [`split_bregman_step`] but also reports `J` after every block.
pub fn split_bregman_step_traced(
    model: &mut AutoencoderModel,
    set: &TrainingSet,
    state: &mut SplitBregmanState,
    config: &TrainConfig,
) -> Result<BlockTrace> {
    Ok(run_step(model, set, state, config, true)?.expect("trace requested"))
}

/// Trains the l1 autoencoder from a seeded initialization.
pub fn train_robust(
    set: &TrainingSet,
    config: &TrainConfig,
) -> Result<(AutoencoderModel, SplitBregmanState)> {
    train_robust_with(set, config, |_, _| true)
}

/// [`train_robust`] with a per-iteration observer `(iteration, J) -> keep_going`.
pub fn train_robust_with(
    set: &TrainingSet,
    config: &TrainConfig,
    mut observer: impl FnMut(usize, f64) -> bool,
) -> Result<(AutoencoderModel, SplitBregmanState)> {
    config.validate()?;
    ensure!(!set.is_empty(), "training set is empty");
    let mut model = AutoencoderModel::init(
        set.input_dim(),
        config.hidden,
        config.activation,
        config.seed,
    )?;
    let mut state = SplitBregmanState::init(&model, set, config)?;
    let mut previous = state.initial_objective;
    let mut quiet = 0usize;
    for _ in 0..config.max_iter {
        let objective = split_bregman_step(&mut model, set, &mut state, config)?;
        let change = libm::fabs(objective - previous) / libm::fabs(previous).max(f64::MIN_POSITIVE);
        previous = objective;
        quiet = if change < config.rel_tol {
            quiet + 1
        } else {
            0
        };
        if !observer(state.iteration, objective) || quiet >= STOPPING_WINDOW {
            break;
        }
    }
    Ok((model, state))
}
