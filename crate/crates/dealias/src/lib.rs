//! Std companion of `dealias-core`: file formats, model bundles, corpus
//! manifests, run configuration, timing, the benchmark harness and the
//! command-line front end.

pub mod bench;
pub mod cli;
pub mod config;
pub mod corpus;
pub mod error;
pub mod fsutil;
pub mod image_io;
pub mod model_io;
pub mod pgm;
pub mod tensor;
pub mod timing;

pub use error::{Error, Result};
