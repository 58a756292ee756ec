//! Cartesian k-space sampling masks and zero-filled inversion.
//!
//! Masks are stored in unshifted FFT layout: the DC coefficient is at
//! `(0, 0)` and frequency index `k` of an `N`-point axis stands for the
//! signed frequency `k` when `k < N/2` and `k − N` otherwise.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{ensure, Result};
use crate::grid::{ComplexGrid, ImageGrid};
use crate::rng::SeededRng;

use super::fft::{fft2, Direction};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MaskKind {
    /// Every location kept independently with probability `fraction`.
    Random { fraction: f64 },
    /// Keep probability `∝ (1 + |k|)^(−decay)`, scaled so the expected
    /// fraction equals `fraction`.
    VariableDensity { fraction: f64, decay: f64 },
    /// `lines` straight lines through DC at angles `π·l/lines`.
    Radial { lines: usize },
    /// Every `stride`-th frequency row.
    Periodic { stride: usize },
    /// Selection supplied externally (e.g. read from disk).
    Loaded,
}

impl MaskKind {
    pub fn name(&self) -> &'static str {
        match self {
            MaskKind::Random { .. } => "random",
            MaskKind::VariableDensity { .. } => "variable-density",
            MaskKind::Radial { .. } => "radial",
            MaskKind::Periodic { .. } => "periodic",
            MaskKind::Loaded => "loaded",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplingMask {
    height: usize,
    width: usize,
    kind: MaskKind,
    selected: Vec<bool>,
}

fn signed_frequency(k: usize, n: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

fn wrap_index(f: i64, n: usize) -> usize {
    f.rem_euclid(n as i64) as usize
}

pub fn make_mask(
    kind: MaskKind,
    height: usize,
    width: usize,
    rng: &mut SeededRng,
) -> Result<SamplingMask> {
    ensure!(height > 0 && width > 0, "mask dims must be positive");
    let total = height * width;
    let mut selected = vec![false; total];
    match kind {
        MaskKind::Random { fraction } => {
            ensure!(
                fraction > 0.0 && fraction <= 1.0,
                "random mask fraction must lie in (0, 1], got {fraction}"
            );
            for s in selected.iter_mut() {
                *s = rng.bernoulli(fraction);
            }
        }
        MaskKind::VariableDensity { fraction, decay } => {
            ensure!(
                fraction > 0.0 && fraction <= 1.0,
                "variable-density fraction must lie in (0, 1], got {fraction}"
            );
            ensure!(
                decay >= 0.0 && decay.is_finite(),
                "decay must be finite and nonnegative, got {decay}"
            );
            let weights: Vec<f64> = (0..total)
                .map(|i| {
                    let fr = signed_frequency(i / width, height) as f64;
                    let fc = signed_frequency(i % width, width) as f64;
                    libm::pow(1.0 + libm::sqrt(fr * fr + fc * fc), -decay)
                })
                .collect();
            let scale = density_scale(&weights, fraction * total as f64);
            for (s, w) in selected.iter_mut().zip(&weights) {
                *s = rng.bernoulli((scale * w).min(1.0));
            }
        }
        MaskKind::Radial { lines } => {
            ensure!(lines >= 1, "radial mask needs at least one line");
            let (hh, hw) = ((height / 2) as f64, (width / 2) as f64);
            let reach = libm::sqrt(hh * hh + hw * hw) + 1.0;
            for l in 0..lines {
                let theta = core::f64::consts::PI * l as f64 / lines as f64;
                let (dy, dx) = (libm::sin(theta), libm::cos(theta));
                let steps = (2.0 * reach / 0.5) as i64;
                for s in 0..=steps {
                    let t = -reach + 0.5 * s as f64;
                    let fr = libm::round(t * dy) as i64;
                    let fc = libm::round(t * dx) as i64;
                    let in_rows = fr >= -(height as i64 / 2) && fr < (height as i64 + 1) / 2;
                    let in_cols = fc >= -(width as i64 / 2) && fc < (width as i64 + 1) / 2;
                    if in_rows && in_cols {
                        selected[wrap_index(fr, height) * width + wrap_index(fc, width)] = true;
                    }
                }
            }
        }
        MaskKind::Periodic { stride } => {
            ensure!(stride >= 1, "periodic stride must be at least 1");
            for r in (0..height).step_by(stride) {
                selected[r * width..(r + 1) * width]
                    .iter_mut()
                    .for_each(|s| *s = true);
            }
        }
        MaskKind::Loaded => {
            return Err(crate::Error::invalid(
                "loaded masks are built with SamplingMask::from_selection",
            ));
        }
    }
    selected[0] = true;
    Ok(SamplingMask {
        height,
        width,
        kind,
        selected,
    })
}

/// Bisection for `c` with `Σ min(1, c·w_i) = target`.
fn density_scale(weights: &[f64], target: f64) -> f64 {
    let expected = |c: f64| weights.iter().map(|w| (c * w).min(1.0)).sum::<f64>();
    let (mut lo, mut hi) = (0.0, 1.0);
    while expected(hi) < target && hi < 1e300 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if expected(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

impl SamplingMask {
    /// Wraps an external selection; DC is forced on.
    pub fn from_selection(height: usize, width: usize, mut selected: Vec<bool>) -> Result<Self> {
        ensure!(height > 0 && width > 0, "mask dims must be positive");
        ensure!(
            selected.len() == height * width,
            "mask selection length {} does not match {height}x{width}",
            selected.len()
        );
        selected[0] = true;
        Ok(Self {
            height,
            width,
            kind: MaskKind::Loaded,
            selected,
        })
    }

    pub fn full(height: usize, width: usize) -> Self {
        Self {
            height,
            width,
            kind: MaskKind::Random { fraction: 1.0 },
            selected: vec![true; height * width],
        }
    }

    pub fn dc_only(height: usize, width: usize) -> Self {
        let mut selected = vec![false; height * width];
        selected[0] = true;
        Self {
            height,
            width,
            kind: MaskKind::Loaded,
            selected,
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn kind(&self) -> MaskKind {
        self.kind
    }

    pub fn selected(&self) -> &[bool] {
        &self.selected
    }

    pub fn is_selected(&self, row: usize, col: usize) -> bool {
        self.selected[row * self.width + col]
    }

    pub fn selected_count(&self) -> usize {
        self.selected.iter().filter(|&&s| s).count()
    }

    /// Achieved sampling fraction, `selected / total`.
    pub fn fraction(&self) -> f64 {
        self.selected_count() as f64 / self.selected.len() as f64
    }

    /// Flat indices of the selected locations, ascending.
    pub fn selected_indices(&self) -> Vec<usize> {
        self.selected
            .iter()
            .enumerate()
            .filter_map(|(i, &s)| s.then_some(i))
            .collect()
    }

    /// `Rᵀ R` applied to a spectrum: unselected coefficients set to zero.
    pub fn apply(&self, kspace: &ComplexGrid) -> Result<ComplexGrid> {
        ensure!(
            kspace.dims() == self.dims(),
            "k-space {:?} and mask {:?} dims differ",
            kspace.dims(),
            self.dims()
        );
        let mut out = kspace.clone();
        for (z, &keep) in out.data_mut().iter_mut().zip(&self.selected) {
            if !keep {
                *z = num_complex::Complex64::new(0.0, 0.0);
            }
        }
        Ok(out)
    }
}

/// Zero-filled inversion `|Fᴴ Rᵀ y|`, with `kspace` holding the full grid.
pub fn zero_fill_invert(kspace: &ComplexGrid, mask: &SamplingMask) -> Result<ImageGrid> {
    let masked = mask.apply(kspace)?;
    Ok(fft2(&masked, Direction::Inverse)?.magnitude())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_every_other_row() {
        let m = make_mask(
            MaskKind::Periodic { stride: 2 },
            64,
            64,
            &mut SeededRng::new(0),
        )
        .unwrap();
        for r in 0..64 {
            for c in 0..64 {
                assert_eq!(m.is_selected(r, c), r % 2 == 0);
            }
        }
        assert_eq!(m.fraction(), 0.5);
    }

    #[test]
    fn random_half_mask_fraction_and_rerun() {
        let kind = MaskKind::Random { fraction: 0.5 };
        let a = make_mask(kind, 128, 128, &mut SeededRng::new(7)).unwrap();
        let b = make_mask(kind, 128, 128, &mut SeededRng::new(7)).unwrap();
        assert_eq!(a, b);
        assert!((0.48..=0.52).contains(&a.fraction()), "{}", a.fraction());
        assert!(a.is_selected(0, 0));
    }

    #[test]
    fn radial_24_lines_frozen_fraction() {
        let m = make_mask(
            MaskKind::Radial { lines: 24 },
            128,
            128,
            &mut SeededRng::new(0),
        )
        .unwrap();
        assert_eq!(m.selected_count(), RADIAL_24_COUNT);
        assert_eq!(m.fraction(), RADIAL_24_COUNT as f64 / 16384.0);
        // every line passes through DC and along both axes
        assert!(m.is_selected(0, 0) && m.is_selected(0, 5) && m.is_selected(5, 0));
    }

    // Counted once from the rasterized 24-line mask on a 128×128 grid.
    const RADIAL_24_COUNT: usize = 3468;

    #[test]
    fn variable_density_hits_target_and_favours_low_frequencies() {
        let kind = MaskKind::VariableDensity {
            fraction: 0.3,
            decay: 1.0,
        };
        let m = make_mask(kind, 128, 128, &mut SeededRng::new(1)).unwrap();
        assert!((m.fraction() - 0.3).abs() < 0.02, "{}", m.fraction());
        let low = (0..8)
            .flat_map(|r| (0..8).map(move |c| (r, c)))
            .filter(|&(r, c)| m.is_selected(r, c))
            .count();
        let high = (56..64)
            .flat_map(|r| (56..64).map(move |c| (r, c)))
            .filter(|&(r, c)| m.is_selected(r, c))
            .count();
        assert!(low > high, "low {low} high {high}");
    }

    #[test]
    fn invalid_parameters() {
        let mut rng = SeededRng::new(0);
        assert!(make_mask(MaskKind::Random { fraction: 0.0 }, 8, 8, &mut rng).is_err());
        assert!(make_mask(MaskKind::Random { fraction: 1.5 }, 8, 8, &mut rng).is_err());
        assert!(make_mask(MaskKind::Radial { lines: 0 }, 8, 8, &mut rng).is_err());
        assert!(make_mask(MaskKind::Periodic { stride: 0 }, 8, 8, &mut rng).is_err());
    }

    #[test]
    fn full_mask_zero_fill_is_identity_on_nonnegative() {
        let img =
            crate::phantom::generate_phantom(crate::phantom::PhantomKind::SheppLogan, 64).unwrap();
        let k = fft2(&img.to_complex(), Direction::Forward).unwrap();
        let back = zero_fill_invert(&k, &SamplingMask::full(64, 64)).unwrap();
        for (a, b) in back.data().iter().zip(img.data()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn dc_only_on_zero_image_is_zero() {
        let k = ComplexGrid::zeros(16, 16);
        let out = zero_fill_invert(&k, &SamplingMask::dc_only(16, 16)).unwrap();
        assert!(out.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn dims_mismatch_rejected() {
        let k = ComplexGrid::zeros(16, 16);
        assert!(zero_fill_invert(&k, &SamplingMask::full(8, 16)).is_err());
    }
}
