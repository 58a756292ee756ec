//! Image-quality metrics and per-method reports.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{ensure, Result};
use crate::grid::ImageGrid;

fn same_dims(a: &ImageGrid, b: &ImageGrid) -> Result<()> {
    ensure!(
        a.dims() == b.dims(),
        "image dims differ: {:?} vs {:?}",
        a.dims(),
        b.dims()
    );
    Ok(())
}

fn l2(values: impl Iterator<Item = f64>) -> f64 {
    libm::sqrt(values.map(|v| v * v).sum())
}

/// `‖estimate − reference‖₂ / ‖reference‖₂`.
pub fn nmse(estimate: &ImageGrid, reference: &ImageGrid) -> Result<f64> {
    same_dims(estimate, reference)?;
    let denom = l2(reference.data().iter().copied());
    ensure!(denom > 0.0, "NMSE reference image is identically zero");
    let num = l2(estimate
        .data()
        .iter()
        .zip(reference.data())
        .map(|(e, r)| e - r));
    Ok(num / denom)
}

pub fn mse(estimate: &ImageGrid, reference: &ImageGrid) -> Result<f64> {
    same_dims(estimate, reference)?;
    let sum: f64 = estimate
        .data()
        .iter()
        .zip(reference.data())
        .map(|(e, r)| (e - r) * (e - r))
        .sum();
    Ok(sum / estimate.len() as f64)
}

/// Peak signal-to-noise ratio in dB. Identical images give `f64::INFINITY`.
pub fn psnr(estimate: &ImageGrid, reference: &ImageGrid, peak: f64) -> Result<f64> {
    let m = mse(estimate, reference)?;
    Ok(psnr_from_mse(m, peak))
}

pub fn psnr_from_mse(mse: f64, peak: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * libm::log10(peak * peak / mse)
    }
}

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;

/// Normalized 11×11 Gaussian (σ = 1.5), row-major.
pub fn ssim_window() -> Vec<f64> {
    let half = (SSIM_WINDOW / 2) as f64;
    let g: Vec<f64> = (0..SSIM_WINDOW)
        .map(|i| {
            let d = i as f64 - half;
            libm::exp(-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA))
        })
        .collect();
    let mut w: Vec<f64> = g
        .iter()
        .flat_map(|a| g.iter().map(move |b| a * b))
        .collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    w
}

/// Mean SSIM over all valid (fully interior) 11×11 windows, dynamic range 1.
///
/// Window statistics are accumulated relative to the window's centre pixel,
/// which keeps flat regions exact (zero variance, mean equal to the value).
pub fn ssim(estimate: &ImageGrid, reference: &ImageGrid) -> Result<f64> {
    same_dims(estimate, reference)?;
    let (h, w) = estimate.dims();
    ensure!(
        h >= SSIM_WINDOW && w >= SSIM_WINDOW,
        "SSIM needs images of at least {SSIM_WINDOW}x{SSIM_WINDOW}, got {h}x{w}"
    );
    let c1 = SSIM_K1 * SSIM_K1;
    let c2 = SSIM_K2 * SSIM_K2;
    let win = ssim_window();
    let x = estimate.data();
    let y = reference.data();
    let half = SSIM_WINDOW / 2;
    let mut first = None;
    let mut shifted_sum = 0.0;
    let mut count = 0usize;
    for r in 0..=h - SSIM_WINDOW {
        for c in 0..=w - SSIM_WINDOW {
            let centre = (r + half) * w + c + half;
            let (xc, yc) = (x[centre], y[centre]);
            let (mut mx, mut my, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for i in 0..SSIM_WINDOW {
                let base = (r + i) * w + c;
                for j in 0..SSIM_WINDOW {
                    let wt = win[i * SSIM_WINDOW + j];
                    let dx = x[base + j] - xc;
                    let dy = y[base + j] - yc;
                    mx += wt * dx;
                    my += wt * dy;
                    sxx += wt * dx * dx;
                    syy += wt * dy * dy;
                    sxy += wt * dx * dy;
                }
            }
            let var_x = sxx - mx * mx;
            let var_y = syy - my * my;
            let cov = sxy - mx * my;
            let (mu_x, mu_y) = (xc + mx, yc + my);
            let luminance = (2.0 * mu_x * mu_y + c1) / (mu_x * mu_x + mu_y * mu_y + c1);
            let structure = (2.0 * cov + c2) / (var_x + var_y + c2);
            let value = luminance * structure;
            let base = *first.get_or_insert(value);
            shifted_sum += value - base;
            count += 1;
        }
    }
    Ok(first.unwrap_or(0.0) + shifted_sum / count as f64)
}

/// One evaluated image.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub name: String,
    pub nmse: f64,
    pub psnr: f64,
    pub ssim: f64,
    pub seconds: f64,
}

impl MetricRow {
    pub fn evaluate(
        name: impl Into<String>,
        estimate: &ImageGrid,
        reference: &ImageGrid,
        seconds: f64,
    ) -> Result<Self> {
        Ok(Self {
            name: name.into(),
            nmse: nmse(estimate, reference)?,
            psnr: psnr(estimate, reference, 1.0)?,
            ssim: ssim(estimate, reference)?,
            seconds,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
}

impl Summary {
    /// Mean and population standard deviation.
    pub fn of(values: &[f64]) -> Self {
        if values.is_empty() {
            return Self::default();
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Self {
            mean,
            std: libm::sqrt(var),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Aggregates {
    pub nmse: Summary,
    pub psnr: Summary,
    pub ssim: Summary,
    pub seconds: Summary,
}

/// Per-image rows for one method; aggregates are always recomputed from rows.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricReport {
    pub method: String,
    pub rows: Vec<MetricRow>,
}

impl MetricReport {
    pub fn new(method: impl Into<String>) -> Self {
        Self {
            method: method.into(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: MetricRow) {
        self.rows.push(row);
    }

    pub fn aggregates(&self) -> Aggregates {
        let col = |f: fn(&MetricRow) -> f64| self.rows.iter().map(f).collect::<Vec<_>>();
        Aggregates {
            nmse: Summary::of(&col(|r| r.nmse)),
            psnr: Summary::of(&col(|r| r.psnr)),
            ssim: Summary::of(&col(|r| r.ssim)),
            seconds: Summary::of(&col(|r| r.seconds)),
        }
    }
}
