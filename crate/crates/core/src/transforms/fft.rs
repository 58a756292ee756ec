//! Radix-2 FFT and the unitary 2D transform used for k-space.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{ensure, Result};
use crate::grid::ComplexGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Precomputed bit-reversal and twiddles for one power-of-two length.
#[derive(Debug, Clone)]
pub struct FftPlan {
    len: usize,
    bitrev: Vec<usize>,
    twiddles: Vec<Complex64>,
}

impl FftPlan {
    pub fn new(len: usize) -> Result<Self> {
        ensure!(
            len.is_power_of_two(),
            "FFT length must be a power of two, got {len}"
        );
        let bits = len.trailing_zeros();
        let bitrev = (0..len)
            .map(|i| {
                if bits == 0 {
                    0
                } else {
                    i.reverse_bits() >> (usize::BITS - bits)
                }
            })
            .collect();
        let twiddles = (0..len / 2)
            .map(|k| {
                let theta = -2.0 * core::f64::consts::PI * k as f64 / len as f64;
                Complex64::new(libm::cos(theta), libm::sin(theta))
            })
            .collect();
        Ok(Self {
            len,
            bitrev,
            twiddles,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Unnormalized in-place transform (`e^{-2πi kn/N}` forward).
    pub fn process(&self, buf: &mut [Complex64], direction: Direction) {
        assert_eq!(buf.len(), self.len, "buffer length must match plan");
        let n = self.len;
        for i in 0..n {
            let j = self.bitrev[i];
            if i < j {
                buf.swap(i, j);
            }
        }
        let mut half = 1;
        while half < n {
            let step = n / (2 * half);
            for start in (0..n).step_by(2 * half) {
                for k in 0..half {
                    let mut w = self.twiddles[k * step];
                    if direction == Direction::Inverse {
                        w = w.conj();
                    }
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            half *= 2;
        }
    }
}

/// Unitary 2D FFT: both directions scale by `1/√(HW)`.
pub fn fft2(grid: &ComplexGrid, direction: Direction) -> Result<ComplexGrid> {
    let (h, w) = grid.dims();
    ensure!(
        h.is_power_of_two() && w.is_power_of_two(),
        "fft2 requires power-of-two dims, got {h}x{w}"
    );
    let row_plan = FftPlan::new(w)?;
    let col_plan = FftPlan::new(h)?;
    let mut out = grid.clone();
    let data = out.data_mut();
    for row in data.chunks_exact_mut(w) {
        row_plan.process(row, direction);
    }
    let mut column = alloc::vec![Complex64::new(0.0, 0.0); h];
    for c in 0..w {
        for r in 0..h {
            column[r] = data[r * w + c];
        }
        col_plan.process(&mut column, direction);
        for r in 0..h {
            data[r * w + c] = column[r];
        }
    }
    let scale = 1.0 / libm::sqrt((h * w) as f64);
    data.iter_mut().for_each(|z| *z *= scale);
    Ok(out)
}
