//! Single-layer de-aliasing autoencoder: l1 training by Split Bregman and an
//! l2 gradient-descent baseline.

mod activation;
pub mod bregman;
pub mod l2;
mod model;
mod ridge;

pub use activation::{activate, Activation};
pub use bregman::{
    relaxed_objective, split_bregman_step, split_bregman_step_traced, train_robust,
    train_robust_with, BlockTrace, BregmanUpdate, CodeUpdate, SplitBregmanState, TrainConfig,
};
pub use l2::{l2_loss, l2_loss_and_gradient, train_l2_baseline, train_l2_baseline_with, L2Config};
pub use model::{append_bias_row, objective_l1, AutoencoderModel, TrainingSet};
pub use ridge::{soft_threshold, solve_ridge_least_squares, Side};
