//! Wall-clock measurement around compute calls only.

use std::time::Instant;

use dealias_core::autoencoder::AutoencoderModel;
use dealias_core::pipeline::{model_patch_size, reconstruct_image};
use dealias_core::ImageGrid;

use crate::error::Result;

pub fn median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty(), "median of nothing");
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Runs `f` `repeats` times; returns the last output and the median seconds.
pub fn time_median<T>(repeats: usize, mut f: impl FnMut() -> Result<T>) -> Result<(T, f64)> {
    let mut samples = Vec::with_capacity(repeats.max(1));
    let mut out = None;
    for _ in 0..repeats.max(1) {
        let start = Instant::now();
        let value = f()?;
        samples.push(start.elapsed().as_secs_f64());
        out = Some(value);
    }
    Ok((out.expect("at least one repetition"), median(&mut samples)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructTiming {
    pub seconds_per_image: f64,
    pub seconds_per_patch: f64,
    pub patches: usize,
}

/// [`reconstruct_image`] with the median wall-clock time of `repeats` runs.
pub fn timed_reconstruct(
    model: &AutoencoderModel,
    degraded: &ImageGrid,
    overlap: bool,
    repeats: usize,
) -> Result<(ImageGrid, ReconstructTiming)> {
    let p = model_patch_size(model)?;
    let stride = if overlap { p / 2 } else { p };
    let patches = dealias_core::pipeline::extract_patches(degraded, p, stride)?.len();
    let (image, seconds) =
        time_median(repeats, || Ok(reconstruct_image(model, degraded, overlap)?))?;
    Ok((
        image,
        ReconstructTiming {
            seconds_per_image: seconds,
            seconds_per_patch: seconds / patches as f64,
            patches,
        },
    ))
}
