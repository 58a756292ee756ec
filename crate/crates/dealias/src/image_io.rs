//! Image, mask, k-space and sinogram persistence. `.pgm` paths use PGM, everything else RDT1.

use std::path::{Path, PathBuf};

use dealias_core::transforms::{ProjectionSet, SamplingMask};
use dealias_core::{ComplexGrid, ImageGrid, Matrix};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fsutil::{read_text, write_atomic};
use crate::pgm::{read_pgm, write_pgm, BitDepth};
use crate::tensor::{read_tensor, write_tensor, Tensor};

fn is_pgm(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm"))
}

pub fn load_image(path: &Path) -> Result<ImageGrid> {
    if is_pgm(path) {
        read_pgm(path)
    } else {
        read_tensor(path)?
            .into_image()
            .map_err(|e| Error::format(path, e.to_string()))
    }
}

pub fn save_image(path: &Path, image: &ImageGrid) -> Result<()> {
    if is_pgm(path) {
        write_pgm(path, image, BitDepth::Eight)
    } else {
        write_tensor(path, &Tensor::from_image(image))
    }
}

/// Mask as a rank-2 tensor of 0/1.
pub fn save_mask(path: &Path, mask: &SamplingMask) -> Result<()> {
    let data = mask
        .selected()
        .iter()
        .map(|&s| if s { 1.0 } else { 0.0 })
        .collect();
    write_tensor(path, &Tensor::new(vec![mask.height(), mask.width()], data)?)
}

pub fn load_mask(path: &Path) -> Result<SamplingMask> {
    let t = read_tensor(path)?;
    let [h, w] = t.dims()[..] else {
        return Err(Error::format(
            path,
            format!("mask must be rank 2, got dims {:?}", t.dims()),
        ));
    };
    if t.data().iter().any(|&v| v != 0.0 && v != 1.0) {
        return Err(Error::format(path, "mask entries must be 0 or 1"));
    }
    let selected = t.data().iter().map(|&v| v == 1.0).collect();
    SamplingMask::from_selection(h, w, selected).map_err(|e| Error::format(path, e.to_string()))
}

/// k-space as a rank-3 tensor `(height, width, 2)` holding `(re, im)`.
pub fn save_kspace(path: &Path, k: &ComplexGrid) -> Result<()> {
    let data = k.data().iter().flat_map(|z| [z.re, z.im]).collect();
    write_tensor(path, &Tensor::new(vec![k.height(), k.width(), 2], data)?)
}

pub fn load_kspace(path: &Path) -> Result<ComplexGrid> {
    let t = read_tensor(path)?;
    let [h, w, 2] = t.dims()[..] else {
        return Err(Error::format(
            path,
            format!("k-space must have dims (h, w, 2), got {:?}", t.dims()),
        ));
    };
    let data = t
        .data()
        .chunks_exact(2)
        .map(|c| Complex64::new(c[0], c[1]))
        .collect();
    ComplexGrid::new(h, w, data).map_err(|e| Error::format(path, e.to_string()))
}

/// Sidecar holding one view angle in degrees per line.
pub fn angles_path(sinogram: &Path) -> PathBuf {
    let mut name = sinogram.as_os_str().to_owned();
    name.push(".angles");
    PathBuf::from(name)
}

pub fn save_sinogram(path: &Path, projections: &ProjectionSet) -> Result<()> {
    write_tensor(path, &Tensor::from_matrix(projections.sinogram()))?;
    let text: String = projections
        .angles_deg()
        .iter()
        .map(|a| format!("{a}\n"))
        .collect();
    write_atomic(&angles_path(path), text.as_bytes())
}

pub fn load_sinogram(path: &Path) -> Result<ProjectionSet> {
    let sino: Matrix = read_tensor(path)?
        .into_matrix()
        .map_err(|e| Error::format(path, e.to_string()))?;
    let side = angles_path(path);
    let angles = read_text(&side)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.parse::<f64>()
                .map_err(|_| Error::format(&side, format!("bad angle {l:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    ProjectionSet::new(angles, sino).map_err(|e| Error::format(path, e.to_string()))
}
