//! Corpus degradation, patch extraction/reassembly and patch-wise inference.

use alloc::vec;
use alloc::vec::Vec;

use crate::autoencoder::{AutoencoderModel, TrainingSet};
use crate::error::{ensure, Result};
use crate::grid::ImageGrid;
use crate::linalg::Matrix;
use crate::rng::SeededRng;
use crate::transforms::{
    angles_with_spacing, fbp_reconstruct, fft2, make_mask, radon_forward, zero_fill_invert,
    Direction, MaskKind, SamplingMask,
};

/// Default patch edge length.
pub const PATCH_SIZE: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Modality {
    /// k-space undersampling followed by zero-filled inversion.
    Mri { mask: MaskKind },
    /// Sparse-view parallel-beam projections followed by FBP.
    Ct { spacing_deg: f64 },
    /// Salt-and-pepper corruption of a fraction of the pixels.
    Impulse { fraction: f64 },
}

impl Modality {
    pub fn name(&self) -> &'static str {
        match self {
            Modality::Mri { .. } => "mri",
            Modality::Ct { .. } => "ct",
            Modality::Impulse { .. } => "impulse",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegradationSpec {
    pub modality: Modality,
    pub seed: u64,
}

impl DegradationSpec {
    pub fn new(modality: Modality, seed: u64) -> Result<Self> {
        let spec = Self { modality, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match self.modality {
            Modality::Mri { mask } => {
                ensure!(
                    mask != MaskKind::Loaded,
                    "mri degradation needs a generated mask kind"
                );
            }
            Modality::Ct { spacing_deg } => {
                ensure!(
                    spacing_deg > 0.0 && spacing_deg < 180.0,
                    "ct spacing must lie in (0, 180), got {spacing_deg}"
                );
            }
            Modality::Impulse { fraction } => {
                ensure!(
                    (0.0..=1.0).contains(&fraction),
                    "impulse fraction must lie in [0, 1], got {fraction}"
                );
            }
        }
        Ok(())
    }

    /// The single k-space mask used for every image of a corpus with these dims.
    pub fn mri_mask(&self, height: usize, width: usize) -> Result<SamplingMask> {
        match self.modality {
            Modality::Mri { mask } => {
                make_mask(mask, height, width, &mut SeededRng::new(self.seed))
            }
            other => Err(crate::Error::invalid(alloc::format!(
                "{} degradation has no sampling mask",
                other.name()
            ))),
        }
    }
}

/// Degrades `image`; `index` decorrelates per-image randomness (impulse positions).
pub fn degrade(image: &ImageGrid, spec: &DegradationSpec, index: u64) -> Result<ImageGrid> {
    spec.validate()?;
    match spec.modality {
        Modality::Mri { .. } => {
            let mask = spec.mri_mask(image.height(), image.width())?;
            degrade_with_mask(image, &mask)
        }
        Modality::Ct { spacing_deg } => {
            ensure!(
                image.height() == image.width(),
                "ct degradation needs a square image"
            );
            let angles = angles_with_spacing(spacing_deg)?;
            fbp_reconstruct(&radon_forward(image, &angles)?, image.height())
        }
        Modality::Impulse { fraction } => {
            let mut rng = SeededRng::split(spec.seed, index);
            let total = image.len();
            let count = libm::round(fraction * total as f64) as usize;
            let mut out = image.clone();
            for idx in rng.sample_distinct(total, count.min(total)) {
                out.data_mut()[idx] = if rng.bernoulli(0.5) { 1.0 } else { 0.0 };
            }
            Ok(out)
        }
    }
}

/// Zero-filled inversion of `image`'s spectrum under `mask`.
pub fn degrade_with_mask(image: &ImageGrid, mask: &SamplingMask) -> Result<ImageGrid> {
    let k = fft2(&image.to_complex(), Direction::Forward)?;
    zero_fill_invert(&k, mask)
}

/// Patches of one image, stored as the columns of a `patch_size² × count` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchGrid {
    patch_size: usize,
    stride: usize,
    rows: usize,
    cols: usize,
    /// Reflect padding added at the (bottom, right).
    padding: (usize, usize),
    original: (usize, usize),
    patches: Matrix,
}

impl PatchGrid {
    pub fn patch_size(&self) -> usize {
        self.patch_size
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn padding(&self) -> (usize, usize) {
        self.padding
    }

    pub fn original_dims(&self) -> (usize, usize) {
        self.original
    }

    pub fn patches(&self) -> &Matrix {
        &self.patches
    }

    /// Same layout with different patch contents (e.g. model outputs).
    pub fn with_patches(&self, patches: Matrix) -> Result<Self> {
        ensure!(
            patches.shape() == self.patches.shape(),
            "patch matrix {:?} does not match grid {:?}",
            patches.shape(),
            self.patches.shape()
        );
        Ok(Self {
            patches,
            ..self.clone()
        })
    }
}

/// Padded length: at least `size`, and `size + k·stride` for the smallest such k.
fn padded_len(len: usize, size: usize, stride: usize) -> usize {
    if len <= size {
        size
    } else {
        size + (len - size).div_ceil(stride) * stride
    }
}

/// Mirror index without repeating the edge sample.
fn reflect(i: usize, len: usize) -> usize {
    if i < len {
        i
    } else {
        2 * (len - 1) - i
    }
}

pub fn extract_patches(image: &ImageGrid, patch_size: usize, stride: usize) -> Result<PatchGrid> {
    ensure!(
        patch_size >= 4,
        "patch size must be at least 4, got {patch_size}"
    );
    ensure!(
        stride == patch_size || (patch_size.is_multiple_of(2) && stride == patch_size / 2),
        "stride must equal the patch size or half of it, got {stride} for size {patch_size}"
    );
    let (h, w) = image.dims();
    let (ph, pw) = (
        padded_len(h, patch_size, stride),
        padded_len(w, patch_size, stride),
    );
    ensure!(
        h >= 2 && w >= 2 && ph - h < h && pw - w < w,
        "{h}x{w} image is too small to reflect-pad to {ph}x{pw}"
    );
    let rows = (ph - patch_size) / stride + 1;
    let cols = (pw - patch_size) / stride + 1;
    let d = patch_size * patch_size;
    let mut patches = Matrix::zeros(d, rows * cols);
    let data = patches.data_mut();
    let n = rows * cols;
    for pr in 0..rows {
        for pc in 0..cols {
            let col = pr * cols + pc;
            for i in 0..patch_size {
                let r = reflect(pr * stride + i, h);
                for j in 0..patch_size {
                    let c = reflect(pc * stride + j, w);
                    data[(i * patch_size + j) * n + col] = image.get(r, c);
                }
            }
        }
    }
    Ok(PatchGrid {
        patch_size,
        stride,
        rows,
        cols,
        padding: (ph - h, pw - w),
        original: (h, w),
        patches,
    })
}

/// Places patches back (averaging where they overlap) and crops the padding.
pub fn reassemble_patches(grid: &PatchGrid) -> Result<ImageGrid> {
    let p = grid.patch_size;
    let n = grid.rows * grid.cols;
    ensure!(
        grid.patches.shape() == (p * p, n),
        "patch matrix {:?} does not match {}x{} grid of {p}x{p} patches",
        grid.patches.shape(),
        grid.rows,
        grid.cols
    );
    let (h, w) = grid.original;
    ensure!(
        padded_len(h, p, grid.stride) == h + grid.padding.0
            && padded_len(w, p, grid.stride) == w + grid.padding.1,
        "padding {:?} inconsistent with original dims {h}x{w}",
        grid.padding
    );
    let (ph, pw) = (h + grid.padding.0, w + grid.padding.1);
    ensure!(
        (ph - p) / grid.stride + 1 == grid.rows && (pw - p) / grid.stride + 1 == grid.cols,
        "patch counts do not match original dims"
    );
    let mut sum = vec![0.0; ph * pw];
    let mut count = vec![0u32; ph * pw];
    let data = grid.patches.data();
    for pr in 0..grid.rows {
        for pc in 0..grid.cols {
            let col = pr * grid.cols + pc;
            for i in 0..p {
                let base = (pr * grid.stride + i) * pw + pc * grid.stride;
                for j in 0..p {
                    sum[base + j] += data[(i * p + j) * n + col];
                    count[base + j] += 1;
                }
            }
        }
    }
    Ok(ImageGrid::from_fn(h, w, |r, c| {
        let idx = r * pw + c;
        sum[idx] / count[idx] as f64
    }))
}

fn stride_for(patch_size: usize, overlap: bool) -> usize {
    if overlap {
        patch_size / 2
    } else {
        patch_size
    }
}

/// Pairs degraded/clean patches of every image; column order is image order × patch order.
pub fn build_training_set(
    clean: &[ImageGrid],
    spec: &DegradationSpec,
    patch_size: usize,
    overlap: bool,
) -> Result<TrainingSet> {
    ensure!(!clean.is_empty(), "training corpus is empty");
    let degraded = clean
        .iter()
        .enumerate()
        .map(|(i, img)| degrade(img, spec, i as u64))
        .collect::<Result<Vec<_>>>()?;
    let pairs: Vec<(&ImageGrid, &ImageGrid)> = clean.iter().zip(&degraded).collect();
    build_training_set_from_pairs(&pairs, patch_size, overlap)
}

/// Like [`build_training_set`] for already degraded `(clean, degraded)` pairs.
pub fn build_training_set_from_pairs(
    pairs: &[(&ImageGrid, &ImageGrid)],
    patch_size: usize,
    overlap: bool,
) -> Result<TrainingSet> {
    ensure!(!pairs.is_empty(), "training corpus is empty");
    let stride = stride_for(patch_size, overlap);
    let mut inputs = Vec::with_capacity(pairs.len());
    let mut targets = Vec::with_capacity(pairs.len());
    for (i, (clean, degraded)) in pairs.iter().enumerate() {
        ensure!(
            clean.dims() == degraded.dims(),
            "image {i}: clean {:?} and degraded {:?} dims differ",
            clean.dims(),
            degraded.dims()
        );
        inputs.push(extract_patches(degraded, patch_size, stride)?.patches);
        targets.push(extract_patches(clean, patch_size, stride)?.patches);
    }
    TrainingSet::from_pairs(&hstack(&inputs)?, &hstack(&targets)?)
}

fn hstack(blocks: &[Matrix]) -> Result<Matrix> {
    let rows = blocks[0].rows();
    ensure!(
        blocks.iter().all(|b| b.rows() == rows),
        "patch blocks differ in row count"
    );
    let total: usize = blocks.iter().map(|b| b.cols()).sum();
    let mut out = Matrix::zeros(rows, total);
    let data = out.data_mut();
    let mut offset = 0;
    for b in blocks {
        for r in 0..rows {
            data[r * total + offset..r * total + offset + b.cols()].copy_from_slice(b.row(r));
        }
        offset += b.cols();
    }
    Ok(out)
}

/// Patch edge length implied by a model's input dimension.
pub fn model_patch_size(model: &AutoencoderModel) -> Result<usize> {
    let d = model.input_dim();
    let p = libm::round(libm::sqrt(d as f64)) as usize;
    ensure!(p * p == d, "model input dim {d} is not a square patch");
    Ok(p)
}

/// Extract → batched forward → reassemble → clamp to `[0, 1]`.
pub fn reconstruct_image(
    model: &AutoencoderModel,
    degraded: &ImageGrid,
    overlap: bool,
) -> Result<ImageGrid> {
    let p = model_patch_size(model)?;
    let grid = extract_patches(degraded, p, stride_for(p, overlap))?;
    let out = model.forward_batch(grid.patches())?;
    Ok(reassemble_patches(&grid.with_patches(out)?)?.clamp(0.0, 1.0))
}
