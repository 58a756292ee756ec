//! Orthonormal sparsifying transforms: multi-level 2D Haar and 2D DCT-II.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{ensure, Result};
use crate::grid::ImageGrid;

use super::fft::Direction;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SparsifyingTransform {
    Haar { levels: usize },
    Dct,
}

impl SparsifyingTransform {
    pub fn name(&self) -> &'static str {
        match self {
            SparsifyingTransform::Haar { .. } => "haar",
            SparsifyingTransform::Dct => "dct",
        }
    }
}

/// Analysis (`Forward`) or synthesis (`Inverse`); both preserve the l2 norm.
pub fn sparsify(
    grid: &ImageGrid,
    transform: SparsifyingTransform,
    direction: Direction,
) -> Result<ImageGrid> {
    let (h, w) = grid.dims();
    let mut data = grid.data().to_vec();
    match transform {
        SparsifyingTransform::Haar { levels } => {
            ensure!(levels >= 1, "haar transform needs at least one level");
            let block = 1usize << levels.min(63);
            ensure!(
                levels < 63 && h % block == 0 && w % block == 0,
                "{h}x{w} is not divisible by 2^{levels}"
            );
            match direction {
                Direction::Forward => {
                    (0..levels).for_each(|l| haar_level(&mut data, w, h >> l, w >> l, false))
                }
                Direction::Inverse => (0..levels)
                    .rev()
                    .for_each(|l| haar_level(&mut data, w, h >> l, w >> l, true)),
            }
        }
        SparsifyingTransform::Dct => {
            let rows = dct_matrix(w);
            let cols = dct_matrix(h);
            let inverse = direction == Direction::Inverse;
            apply_separable(&mut data, h, w, &rows, &cols, inverse);
        }
    }
    ImageGrid::new(h, w, data)
}

/// One Haar level on the top-left `bh × bw` block of a row-major buffer with row stride `stride`.
fn haar_level(data: &mut [f64], stride: usize, bh: usize, bw: usize, inverse: bool) {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let mut tmp = vec![0.0; bh.max(bw)];
    let mut rows = |data: &mut [f64]| {
        for r in 0..bh {
            let row = &mut data[r * stride..r * stride + bw];
            haar_1d(row, &mut tmp[..bw], s, inverse);
        }
    };
    let mut column = vec![0.0; bh];
    let mut tmp_col = vec![0.0; bh];
    let mut cols = |data: &mut [f64]| {
        for c in 0..bw {
            for r in 0..bh {
                column[r] = data[r * stride + c];
            }
            haar_1d(&mut column, &mut tmp_col, s, inverse);
            for r in 0..bh {
                data[r * stride + c] = column[r];
            }
        }
    };
    if inverse {
        cols(data);
        rows(data);
    } else {
        rows(data);
        cols(data);
    }
}

fn haar_1d(x: &mut [f64], tmp: &mut [f64], s: f64, inverse: bool) {
    let half = x.len() / 2;
    if inverse {
        for i in 0..half {
            let (a, d) = (x[i], x[half + i]);
            tmp[2 * i] = (a + d) * s;
            tmp[2 * i + 1] = (a - d) * s;
        }
    } else {
        for i in 0..half {
            let (p, q) = (x[2 * i], x[2 * i + 1]);
            tmp[i] = (p + q) * s;
            tmp[half + i] = (p - q) * s;
        }
    }
    x.copy_from_slice(tmp);
}

/// Orthonormal DCT-II basis, row `k` holds frequency `k`.
fn dct_matrix(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for k in 0..n {
        let alpha = if k == 0 {
            libm::sqrt(1.0 / n as f64)
        } else {
            libm::sqrt(2.0 / n as f64)
        };
        for i in 0..n {
            m[k * n + i] = alpha
                * libm::cos(core::f64::consts::PI * (2 * i + 1) as f64 * k as f64 / (2 * n) as f64);
        }
    }
    m
}

fn apply_separable(
    data: &mut [f64],
    h: usize,
    w: usize,
    row_basis: &[f64],
    col_basis: &[f64],
    inverse: bool,
) {
    let transform = |input: &[f64], out: &mut [f64], basis: &[f64], n: usize| {
        for k in 0..n {
            out[k] = if inverse {
                (0..n).map(|i| basis[i * n + k] * input[i]).sum()
            } else {
                (0..n).map(|i| basis[k * n + i] * input[i]).sum()
            };
        }
    };
    let mut out = vec![0.0; w];
    for r in 0..h {
        transform(&data[r * w..(r + 1) * w], &mut out, row_basis, w);
        data[r * w..(r + 1) * w].copy_from_slice(&out);
    }
    let mut col = vec![0.0; h];
    let mut out = vec![0.0; h];
    for c in 0..w {
        for r in 0..h {
            col[r] = data[r * w + c];
        }
        transform(&col, &mut out, col_basis, h);
        for r in 0..h {
            data[r * w + c] = out[r];
        }
    }
}
