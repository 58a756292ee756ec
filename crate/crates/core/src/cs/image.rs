use alloc::vec::Vec;

use crate::error::{ensure, Result};
use crate::grid::{ComplexGrid, ImageGrid};
use crate::transforms::{
    fft2, sparsify, Direction, ProjectionSet, SamplingMask, SparsifyingTransform,
};

use super::operator::{max_eigenvalue, LinearOperator};
use super::solvers::{ista_solve_with_step, CsSolveReport, POWER_ITERATIONS, STEP_MARGIN};

/// CS-MRI: ISTA on sparsifier coefficients from the masked k-space, then `|W α|`.
///
/// `kspace` is the full grid; only the masked entries are read. Runs exactly
/// `max_iter` iterations.
pub fn cs_reconstruct_image(
    kspace: &ComplexGrid,
    mask: &SamplingMask,
    transform: SparsifyingTransform,
    lambda: f64,
    max_iter: usize,
) -> Result<ImageGrid> {
    Ok(cs_reconstruct_image_report(kspace, mask, transform, lambda, max_iter)?.0)
}

pub fn cs_reconstruct_image_report(
    kspace: &ComplexGrid,
    mask: &SamplingMask,
    transform: SparsifyingTransform,
    lambda: f64,
    max_iter: usize,
) -> Result<(ImageGrid, CsSolveReport)> {
    ensure!(
        kspace.dims() == mask.dims(),
        "k-space {:?} and mask {:?} dims differ",
        kspace.dims(),
        mask.dims()
    );
    let mut y = Vec::with_capacity(2 * mask.selected_count());
    for (z, &keep) in kspace.data().iter().zip(mask.selected()) {
        if keep {
            y.push(z.re);
            y.push(z.im);
        }
    }
    let op = LinearOperator::MaskedFourier {
        mask: mask.clone(),
        transform,
    };
    // A row selection of a unitary map composed with an orthonormal one: λ_max(AᵀA) = 1.
    let report = ista_solve_with_step(&op, &y, lambda, max_iter, 0.0, STEP_MARGIN, None)?;
    let (h, w) = mask.dims();
    let coeffs = ImageGrid::new(h, w, report.solution.clone())?;
    let image = sparsify(&coeffs, transform, Direction::Inverse)?;
    // magnitude of a real image
    Ok((image.map(f64::abs), report))
}

/// Sparse-view CT: ISTA on sparsifier coefficients against the sinogram.
pub fn cs_reconstruct_ct(
    projections: &ProjectionSet,
    size: usize,
    transform: SparsifyingTransform,
    lambda: f64,
    max_iter: usize,
) -> Result<ImageGrid> {
    let op = LinearOperator::SparseViewRadon {
        size,
        angles_deg: projections.angles_deg().to_vec(),
        transform,
    };
    ensure!(
        projections.sinogram().data().len() == op.out_dim(),
        "sinogram size does not match a {size}x{size} image"
    );
    let l_max = max_eigenvalue(&op, POWER_ITERATIONS, 0)?;
    ensure!(l_max > 0.0, "projection operator is zero");
    let report = ista_solve_with_step(
        &op,
        projections.sinogram().data(),
        lambda,
        max_iter,
        0.0,
        STEP_MARGIN / l_max,
        None,
    )?;
    let coeffs = ImageGrid::new(size, size, report.solution)?;
    sparsify(&coeffs, transform, Direction::Inverse)
}

#[allow(dead_code)]
fn kspace_of(image: &ImageGrid) -> Result<ComplexGrid> {
    fft2(&image.to_complex(), Direction::Forward)
}
