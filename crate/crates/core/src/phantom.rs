//! Synthetic test images: Shepp-Logan, a fixed disk arrangement, and seeded
//! random-ellipse phantoms for building training corpora.
//!
//! Pixel `(row, col)` of an `n × n` phantom samples the point
//! `x = (2·col + 1 − n) / n`, `y = (n − 1 − 2·row) / n` of the square
//! `[−1, 1]²` (y points up, row 0 is the top).

use alloc::vec::Vec;

use crate::error::{ensure, Result};
use crate::grid::ImageGrid;
use crate::rng::SeededRng;

/// An additive ellipse: every sample inside contributes `intensity`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipse {
    pub intensity: f64,
    /// Semi-axis along the (rotated) x direction.
    pub semi_x: f64,
    /// Semi-axis along the (rotated) y direction.
    pub semi_y: f64,
    pub center_x: f64,
    pub center_y: f64,
    /// Counter-clockwise rotation in degrees.
    pub angle_deg: f64,
}

impl Ellipse {
    const fn new(
        intensity: f64,
        semi_x: f64,
        semi_y: f64,
        center_x: f64,
        center_y: f64,
        angle_deg: f64,
    ) -> Self {
        Self {
            intensity,
            semi_x,
            semi_y,
            center_x,
            center_y,
            angle_deg,
        }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        let theta = self.angle_deg.to_radians();
        let (s, c) = (libm::sin(theta), libm::cos(theta));
        let dx = x - self.center_x;
        let dy = y - self.center_y;
        let u = dx * c + dy * s;
        let v = -dx * s + dy * c;
        (u / self.semi_x) * (u / self.semi_x) + (v / self.semi_y) * (v / self.semi_y) <= 1.0
    }
}

/// The standard (non-modified) ten-ellipse Shepp-Logan head.
///
/// Peak raw intensity is 2.0 (the skull rim); [`generate_phantom`] divides by
/// [`SHEPP_LOGAN_PEAK`] so the image lies in `[0, 1]`.
pub const SHEPP_LOGAN: [Ellipse; 10] = [
    Ellipse::new(2.0, 0.69, 0.92, 0.0, 0.0, 0.0),
    Ellipse::new(-0.98, 0.6624, 0.874, 0.0, -0.0184, 0.0),
    Ellipse::new(-0.02, 0.11, 0.31, 0.22, 0.0, -18.0),
    Ellipse::new(-0.02, 0.16, 0.41, -0.22, 0.0, 18.0),
    Ellipse::new(0.01, 0.21, 0.25, 0.0, 0.35, 0.0),
    Ellipse::new(0.01, 0.046, 0.046, 0.0, 0.1, 0.0),
    Ellipse::new(0.01, 0.046, 0.046, 0.0, -0.1, 0.0),
    Ellipse::new(0.01, 0.046, 0.023, -0.08, -0.605, 0.0),
    Ellipse::new(0.01, 0.023, 0.023, 0.0, -0.606, 0.0),
    Ellipse::new(0.01, 0.023, 0.046, 0.06, -0.605, 0.0),
];

pub const SHEPP_LOGAN_PEAK: f64 = 2.0;

const DISKS: [Ellipse; 7] = [
    Ellipse::new(0.5, 0.85, 0.85, 0.0, 0.0, 0.0),
    Ellipse::new(0.5, 0.2, 0.2, -0.4, 0.35, 0.0),
    Ellipse::new(0.3, 0.15, 0.15, 0.4, 0.4, 0.0),
    Ellipse::new(-0.3, 0.12, 0.12, 0.0, -0.5, 0.0),
    Ellipse::new(0.2, 0.08, 0.08, 0.45, -0.3, 0.0),
    Ellipse::new(-0.2, 0.25, 0.25, -0.2, -0.2, 0.0),
    Ellipse::new(0.4, 0.05, 0.05, 0.2, 0.05, 0.0),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhantomKind {
    SheppLogan,
    Disks,
}

impl core::str::FromStr for PhantomKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shepp-logan" => Ok(Self::SheppLogan),
            "disks" => Ok(Self::Disks),
            other => Err(crate::Error::invalid(alloc::format!(
                "unknown phantom kind `{other}`"
            ))),
        }
    }
}

/// Phantom-plane coordinate `(x, y)` sampled by pixel `(row, col)`.
pub fn pixel_coordinate(size: usize, row: usize, col: usize) -> (f64, f64) {
    let n = size as f64;
    (
        (2.0 * col as f64 + 1.0 - n) / n,
        (n - 1.0 - 2.0 * row as f64) / n,
    )
}

/// Sums ellipse intensities at every pixel centre.
pub fn rasterize(ellipses: &[Ellipse], size: usize) -> ImageGrid {
    ImageGrid::from_fn(size, size, |r, c| {
        let (x, y) = pixel_coordinate(size, r, c);
        ellipses
            .iter()
            .filter(|e| e.contains(x, y))
            .map(|e| e.intensity)
            .sum()
    })
}

pub fn generate_phantom(kind: PhantomKind, size: usize) -> Result<ImageGrid> {
    ensure!(size >= 16, "phantom size must be at least 16, got {size}");
    Ok(match kind {
        PhantomKind::SheppLogan => rasterize(&SHEPP_LOGAN, size).map(|v| v / SHEPP_LOGAN_PEAK),
        PhantomKind::Disks => rasterize(&DISKS, size).clamp(0.0, 1.0),
    })
}

/// Seeded random-ellipse phantom in `[0, 1]`: a body ellipse plus 4–9
/// interior features of random size, orientation and contrast.
pub fn random_phantom(size: usize, rng: &mut SeededRng) -> Result<ImageGrid> {
    ensure!(size >= 16, "phantom size must be at least 16, got {size}");
    let mut ellipses = Vec::new();
    let body_x = rng.uniform_range(0.6, 0.9);
    let body_y = rng.uniform_range(0.6, 0.9);
    let body_angle = rng.uniform_range(-30.0, 30.0);
    ellipses.push(Ellipse::new(
        rng.uniform_range(0.8, 1.0),
        body_x,
        body_y,
        rng.uniform_range(-0.05, 0.05),
        rng.uniform_range(-0.05, 0.05),
        body_angle,
    ));
    ellipses.push(Ellipse::new(
        -rng.uniform_range(0.3, 0.5),
        body_x * 0.9,
        body_y * 0.9,
        ellipses[0].center_x,
        ellipses[0].center_y,
        body_angle,
    ));
    let features = 4 + rng.below(6);
    for _ in 0..features {
        let radius = rng.uniform_range(0.0, 0.5);
        let phi = rng.uniform_range(0.0, 2.0 * core::f64::consts::PI);
        ellipses.push(Ellipse::new(
            rng.uniform_range(-0.3, 0.3),
            rng.uniform_range(0.03, 0.3),
            rng.uniform_range(0.03, 0.3),
            radius * body_x * libm::cos(phi),
            radius * body_y * libm::sin(phi),
            rng.uniform_range(0.0, 180.0),
        ));
    }
    Ok(rasterize(&ellipses, size).clamp(0.0, 1.0))
}
