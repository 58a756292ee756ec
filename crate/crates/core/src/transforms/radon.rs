//! Parallel-beam radon transform (rotate-and-sum) and filtered back projection.
//!
//! Geometry: for an `n × n` image with pixel spacing 1, the image centre
//! sits at `(n − 1)/2`. A view at angle θ integrates along direction
//! `(−sin θ, cos θ)`; detector bin `k` sits at signed offset
//! `s = k − (bins − 1)/2` along `(cos θ, sin θ)`. Each ray is sampled at unit
//! steps and every sample reads the image by bilinear interpolation (zero
//! outside). [`backproject`] scatters with the very same weights, so it is
//! the exact transpose of [`radon_forward`].

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{ensure, Result};
use crate::grid::ImageGrid;
use crate::linalg::Matrix;

use super::fft::{Direction, FftPlan};

/// A sinogram: one row per view angle, one column per detector bin.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionSet {
    angles_deg: Vec<f64>,
    detector_bins: usize,
    sinogram: Matrix,
}

impl ProjectionSet {
    pub fn new(angles_deg: Vec<f64>, sinogram: Matrix) -> Result<Self> {
        validate_angles(&angles_deg)?;
        ensure!(
            sinogram.rows() == angles_deg.len(),
            "sinogram has {} rows for {} angles",
            sinogram.rows(),
            angles_deg.len()
        );
        ensure!(
            sinogram.cols() > 0,
            "sinogram needs at least one detector bin"
        );
        ensure!(sinogram.is_finite(), "sinogram contains non-finite values");
        Ok(Self {
            detector_bins: sinogram.cols(),
            angles_deg,
            sinogram,
        })
    }

    pub fn angles_deg(&self) -> &[f64] {
        &self.angles_deg
    }

    pub fn detector_bins(&self) -> usize {
        self.detector_bins
    }

    pub fn sinogram(&self) -> &Matrix {
        &self.sinogram
    }

    pub fn projection(&self, view: usize) -> &[f64] {
        self.sinogram.row(view)
    }

    /// Same geometry, new sinogram values.
    pub fn with_sinogram(&self, sinogram: Matrix) -> Result<Self> {
        Self::new(self.angles_deg.clone(), sinogram)
    }
}

fn validate_angles(angles: &[f64]) -> Result<()> {
    ensure!(
        !angles.is_empty(),
        "at least one projection angle is required"
    );
    ensure!(
        angles
            .iter()
            .all(|a| a.is_finite() && (0.0..180.0).contains(a)),
        "projection angles must lie in [0, 180)"
    );
    ensure!(
        angles.windows(2).all(|w| w[0] < w[1]),
        "projection angles must be strictly increasing"
    );
    Ok(())
}

/// Detector count for an `n × n` image: `ceil(√2·n)`, bumped to the next odd number.
pub fn detector_bins_for(size: usize) -> usize {
    let bins = libm::ceil(core::f64::consts::SQRT_2 * size as f64) as usize;
    if bins.is_multiple_of(2) {
        bins + 1
    } else {
        bins
    }
}

/// Angles `0, Δ, 2Δ, …` below 180°.
pub fn angles_with_spacing(spacing_deg: f64) -> Result<Vec<f64>> {
    ensure!(
        spacing_deg > 0.0 && spacing_deg < 180.0,
        "angular spacing must lie in (0, 180), got {spacing_deg}"
    );
    let mut out = Vec::new();
    let mut k = 0usize;
    loop {
        let a = k as f64 * spacing_deg;
        if a >= 180.0 {
            break;
        }
        out.push(a);
        k += 1;
    }
    Ok(out)
}

/// Visits every ray sample of one view: `f(bin, pixel_index, weight)` for each
/// in-bounds bilinear neighbour.
fn for_each_sample(size: usize, bins: usize, angle_deg: f64, mut f: impl FnMut(usize, usize, f64)) {
    let theta = angle_deg.to_radians();
    let (sin_t, cos_t) = (libm::sin(theta), libm::cos(theta));
    let centre = (size as f64 - 1.0) / 2.0;
    let half = (bins as f64 - 1.0) / 2.0;
    let limit = size as f64 - 1.0;
    for bin in 0..bins {
        let s = bin as f64 - half;
        for step in 0..bins {
            let u = step as f64 - half;
            let x = s * cos_t - u * sin_t;
            let y = s * sin_t + u * cos_t;
            let col = centre + x;
            let row = centre - y;
            if !(row > -1.0 && row < limit + 1.0 && col > -1.0 && col < limit + 1.0) {
                continue;
            }
            let r0 = libm::floor(row);
            let c0 = libm::floor(col);
            let fr = row - r0;
            let fc = col - c0;
            let (r0, c0) = (r0 as i64, c0 as i64);
            let corners = [
                (r0, c0, (1.0 - fr) * (1.0 - fc)),
                (r0, c0 + 1, (1.0 - fr) * fc),
                (r0 + 1, c0, fr * (1.0 - fc)),
                (r0 + 1, c0 + 1, fr * fc),
            ];
            for (r, c, w) in corners {
                if r >= 0 && c >= 0 && (r as usize) < size && (c as usize) < size && w != 0.0 {
                    f(bin, r as usize * size + c as usize, w);
                }
            }
        }
    }
}

pub fn radon_forward(image: &ImageGrid, angles_deg: &[f64]) -> Result<ProjectionSet> {
    ensure!(
        image.height() == image.width(),
        "radon transform needs a square image, got {}x{}",
        image.height(),
        image.width()
    );
    validate_angles(angles_deg)?;
    let size = image.height();
    let bins = detector_bins_for(size);
    let pixels = image.data();
    let mut sinogram = Matrix::zeros(angles_deg.len(), bins);
    for (view, &angle) in angles_deg.iter().enumerate() {
        let row = &mut sinogram.data_mut()[view * bins..(view + 1) * bins];
        for_each_sample(size, bins, angle, |bin, idx, w| row[bin] += w * pixels[idx]);
    }
    ProjectionSet::new(angles_deg.to_vec(), sinogram)
}

/// Unfiltered backprojection, the exact adjoint of [`radon_forward`].
pub fn backproject(projections: &ProjectionSet, size: usize) -> Result<ImageGrid> {
    ensure!(
        projections.detector_bins() == detector_bins_for(size),
        "{} detector bins do not match a {size}x{size} image (expected {})",
        projections.detector_bins(),
        detector_bins_for(size)
    );
    let mut acc = vec![0.0; size * size];
    for (view, &angle) in projections.angles_deg().iter().enumerate() {
        let row = projections.projection(view);
        for_each_sample(size, projections.detector_bins(), angle, |bin, idx, w| {
            acc[idx] += w * row[bin]
        });
    }
    ImageGrid::new(size, size, acc)
}

/// Ramp filter variant applied before backprojection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RampWindow {
    /// Plain Ram-Lak.
    #[default]
    None,
    /// Ram-Lak multiplied by a Hann window.
    Hann,
}

/// Frequency response of the band-limited ramp for a padded length `len`,
/// from the spatial Ram-Lak kernel `h[0] = 1/4`, `h[odd n] = −1/(πn)²`.
fn ramp_response(len: usize, window: RampWindow) -> Result<Vec<f64>> {
    let plan = FftPlan::new(len)?;
    let mut kernel = vec![Complex64::new(0.0, 0.0); len];
    kernel[0] = Complex64::new(0.25, 0.0);
    for n in 1..len / 2 {
        if n % 2 == 1 {
            let pn = core::f64::consts::PI * n as f64;
            let v = -1.0 / (pn * pn);
            kernel[n] = Complex64::new(v, 0.0);
            kernel[len - n] = Complex64::new(v, 0.0);
        }
    }
    plan.process(&mut kernel, Direction::Forward);
    Ok(kernel
        .iter()
        .enumerate()
        .map(|(k, z)| {
            let f = if k <= len / 2 {
                k as f64
            } else {
                k as f64 - len as f64
            } / len as f64;
            let w = match window {
                RampWindow::None => 1.0,
                RampWindow::Hann => 0.5 * (1.0 + libm::cos(2.0 * core::f64::consts::PI * f)),
            };
            z.re * w
        })
        .collect())
}

/// Ramp-filters every projection (zero-padded to a power of two ≥ 2·bins).
pub fn ramp_filter(projections: &ProjectionSet, window: RampWindow) -> Result<ProjectionSet> {
    let bins = projections.detector_bins();
    let len = (2 * bins).next_power_of_two();
    let plan = FftPlan::new(len)?;
    let response = ramp_response(len, window)?;
    let mut out = Matrix::zeros(projections.angles_deg().len(), bins);
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for view in 0..projections.angles_deg().len() {
        buf.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        for (z, &p) in buf.iter_mut().zip(projections.projection(view)) {
            *z = Complex64::new(p, 0.0);
        }
        plan.process(&mut buf, Direction::Forward);
        buf.iter_mut().zip(&response).for_each(|(z, &h)| *z *= h);
        plan.process(&mut buf, Direction::Inverse);
        let inv = 1.0 / len as f64;
        for (bin, z) in buf.iter().take(bins).enumerate() {
            out.set(view, bin, z.re * inv);
        }
    }
    projections.with_sinogram(out)
}

/// Filtered back projection with π/views scaling.
pub fn fbp_reconstruct(projections: &ProjectionSet, size: usize) -> Result<ImageGrid> {
    fbp_reconstruct_windowed(projections, size, RampWindow::None)
}

pub fn fbp_reconstruct_windowed(
    projections: &ProjectionSet,
    size: usize,
    window: RampWindow,
) -> Result<ImageGrid> {
    ensure!(size > 0, "image size must be positive");
    ensure!(
        projections.detector_bins() == detector_bins_for(size),
        "{} detector bins do not match a {size}x{size} image (expected {})",
        projections.detector_bins(),
        detector_bins_for(size)
    );
    let filtered = ramp_filter(projections, window)?;
    let scale = core::f64::consts::PI / projections.angles_deg().len() as f64;
    Ok(backproject(&filtered, size)?.map(|v| v * scale))
}
