//! Acquisition simulation and crude analytic inversion.

pub mod fft;
pub mod mask;
pub mod radon;
pub mod sparsify;

pub use fft::{fft2, Direction, FftPlan};
pub use mask::{make_mask, zero_fill_invert, MaskKind, SamplingMask};
pub use radon::{
    angles_with_spacing, backproject, detector_bins_for, fbp_reconstruct, fbp_reconstruct_windowed,
    radon_forward, ProjectionSet, RampWindow,
};
pub use sparsify::{sparsify, SparsifyingTransform};
