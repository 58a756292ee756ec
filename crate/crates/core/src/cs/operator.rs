use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{ensure, Result};
use crate::grid::{ComplexGrid, ImageGrid};
use crate::linalg::Matrix;
use crate::rng::SeededRng;
use crate::transforms::{
    backproject, fft2, radon_forward, sparsify, Direction, ProjectionSet, SamplingMask,
    SparsifyingTransform,
};

/// Linear map between real vector spaces, with its adjoint.
#[derive(Debug, Clone)]
pub enum LinearOperator {
    Explicit(Matrix),
    /// `α ↦ R F W α`: synthesis by the sparsifier, unitary FFT, then the
    /// selected coefficients as interleaved `(re, im)` pairs.
    MaskedFourier {
        mask: SamplingMask,
        transform: SparsifyingTransform,
    },
    /// `α ↦ Radon(W α)` over a fixed set of view angles, sinogram row-major.
    SparseViewRadon {
        size: usize,
        angles_deg: Vec<f64>,
        transform: SparsifyingTransform,
    },
}

impl LinearOperator {
    pub fn in_dim(&self) -> usize {
        match self {
            LinearOperator::Explicit(a) => a.cols(),
            LinearOperator::MaskedFourier { mask, .. } => mask.height() * mask.width(),
            LinearOperator::SparseViewRadon { size, .. } => size * size,
        }
    }

    pub fn out_dim(&self) -> usize {
        match self {
            LinearOperator::Explicit(a) => a.rows(),
            LinearOperator::MaskedFourier { mask, .. } => 2 * mask.selected_count(),
            LinearOperator::SparseViewRadon {
                size, angles_deg, ..
            } => angles_deg.len() * crate::transforms::detector_bins_for(*size),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            LinearOperator::Explicit(_) => "explicit-matrix",
            LinearOperator::MaskedFourier { .. } => "masked-fourier-with-sparsifier",
            LinearOperator::SparseViewRadon { .. } => "sparse-view-radon-with-sparsifier",
        }
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        ensure!(
            x.len() == self.in_dim(),
            "operator input has length {}, expected {}",
            x.len(),
            self.in_dim()
        );
        match self {
            LinearOperator::Explicit(a) => Ok((0..a.rows()).map(|r| dot(a.row(r), x)).collect()),
            LinearOperator::MaskedFourier { mask, transform } => {
                let (h, w) = mask.dims();
                let image = sparsify(
                    &ImageGrid::new(h, w, x.to_vec())?,
                    *transform,
                    Direction::Inverse,
                )?;
                let k = fft2(&image.to_complex(), Direction::Forward)?;
                let mut out = Vec::with_capacity(self.out_dim());
                for (z, &keep) in k.data().iter().zip(mask.selected()) {
                    if keep {
                        out.push(z.re);
                        out.push(z.im);
                    }
                }
                Ok(out)
            }
            LinearOperator::SparseViewRadon {
                size,
                angles_deg,
                transform,
            } => {
                let image = sparsify(
                    &ImageGrid::new(*size, *size, x.to_vec())?,
                    *transform,
                    Direction::Inverse,
                )?;
                Ok(radon_forward(&image, angles_deg)?
                    .sinogram()
                    .data()
                    .to_vec())
            }
        }
    }

    pub fn adjoint(&self, y: &[f64]) -> Result<Vec<f64>> {
        ensure!(
            y.len() == self.out_dim(),
            "adjoint input has length {}, expected {}",
            y.len(),
            self.out_dim()
        );
        match self {
            LinearOperator::Explicit(a) => {
                let mut out = vec![0.0; a.cols()];
                for (r, &yr) in y.iter().enumerate() {
                    out.iter_mut().zip(a.row(r)).for_each(|(o, v)| *o += v * yr);
                }
                Ok(out)
            }
            LinearOperator::MaskedFourier { mask, transform } => {
                let (h, w) = mask.dims();
                let mut k = ComplexGrid::zeros(h, w);
                let mut pairs = y.chunks_exact(2);
                for (z, &keep) in k.data_mut().iter_mut().zip(mask.selected()) {
                    if keep {
                        let p = pairs.next().expect("length checked above");
                        *z = Complex64::new(p[0], p[1]);
                    }
                }
                let image = fft2(&k, Direction::Inverse)?.real_part();
                Ok(sparsify(&image, *transform, Direction::Forward)?.into_data())
            }
            LinearOperator::SparseViewRadon {
                size,
                angles_deg,
                transform,
            } => {
                let bins = crate::transforms::detector_bins_for(*size);
                let sino = Matrix::from_vec(angles_deg.len(), bins, y.to_vec())?;
                let image = backproject(&ProjectionSet::new(angles_deg.clone(), sino)?, *size)?;
                Ok(sparsify(&image, *transform, Direction::Forward)?.into_data())
            }
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

/// Largest eigenvalue of `AᵀA` by power iteration from a seeded start.
///
/// Returns 0 for the zero operator.
pub fn max_eigenvalue(op: &LinearOperator, iters: usize, seed: u64) -> Result<f64> {
    ensure!(
        iters >= 10,
        "power iteration needs at least 10 iterations, got {iters}"
    );
    let mut rng = SeededRng::new(seed);
    let mut v: Vec<f64> = (0..op.in_dim()).map(|_| rng.normal()).collect();
    let n0 = norm(&v);
    ensure!(n0 > 0.0, "operator has zero input dimension");
    v.iter_mut().for_each(|x| *x /= n0);
    let mut rayleigh = 0.0;
    for _ in 0..iters {
        let w = op.adjoint(&op.apply(&v)?)?;
        rayleigh = dot(&v, &w);
        let nw = norm(&w);
        if nw == 0.0 {
            return Ok(0.0);
        }
        v = w.into_iter().map(|x| x / nw).collect();
    }
    // Rayleigh quotient at the final iterate
    let av = op.apply(&v)?;
    let last = dot(&av, &av);
    Ok(if last.is_finite() { last } else { rayleigh })
}
