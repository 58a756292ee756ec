//! Numerical core of the de-aliasing toolkit.
//!
//! Everything here is pure computation over in-memory buffers: grid
//! containers, seeded randomness, phantoms, acquisition operators and their
//! crude inversions, the robust l1 autoencoder and its Split Bregman
//! trainer, classical sparse-recovery baselines, the patch pipeline and
//! image-quality metrics. The crate is `no_std` and needs only `alloc`; the
//! default `std` feature merely lets the matrix kernels pick SIMD paths at
//! runtime. File formats, timing and the command line live in the `dealias`
//! companion crate.

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

pub mod autoencoder;
pub mod cs;
pub mod error;
pub mod grid;
pub mod linalg;
pub mod metrics;
pub mod phantom;
pub mod pipeline;
pub mod rng;
pub mod transforms;

pub use error::{Error, Result};
pub use grid::{ComplexGrid, ImageGrid};
pub use linalg::Matrix;
pub use rng::SeededRng;
