//! RDT1 tensor files: `"RDT1"`, rank `u8`, `u32` LE dims, `f32` LE row-major payload.

use std::path::Path;

use dealias_core::{ImageGrid, Matrix};

use crate::error::{Error, Result};
use crate::fsutil::{read_bytes, write_atomic};

pub const MAGIC: &[u8; 4] = b"RDT1";

/// Dense row-major tensor held in double precision.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    dims: Vec<usize>,
    data: Vec<f64>,
}

impl Tensor {
    pub fn new(dims: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        let len = element_count(&dims)
            .ok_or_else(|| Error::usage(format!("tensor dims {dims:?} overflow")))?;
        if len != data.len() {
            return Err(Error::usage(format!(
                "tensor dims {dims:?} need {len} values, got {}",
                data.len()
            )));
        }
        Ok(Self { dims, data })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn from_image(image: &ImageGrid) -> Self {
        Self {
            dims: vec![image.height(), image.width()],
            data: image.data().to_vec(),
        }
    }

    pub fn from_matrix(m: &Matrix) -> Self {
        Self {
            dims: vec![m.rows(), m.cols()],
            data: m.data().to_vec(),
        }
    }

    pub fn into_image(self) -> Result<ImageGrid> {
        match self.dims[..] {
            [h, w] => Ok(ImageGrid::new(h, w, self.data)?),
            _ => Err(Error::usage(format!(
                "expected a rank-2 tensor, got dims {:?}",
                self.dims
            ))),
        }
    }

    pub fn into_matrix(self) -> Result<Matrix> {
        match self.dims[..] {
            [r, c] => Ok(Matrix::from_vec(r, c, self.data)?),
            _ => Err(Error::usage(format!(
                "expected a rank-2 tensor, got dims {:?}",
                self.dims
            ))),
        }
    }
}

fn element_count(dims: &[usize]) -> Option<usize> {
    dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d))
}

/// Serializes to RDT1 bytes. Fails on non-finite values or dims beyond `u32`.
pub fn encode_tensor(tensor: &Tensor) -> std::result::Result<Vec<u8>, String> {
    if tensor.dims.len() > u8::MAX as usize {
        return Err(format!("rank {} exceeds 255", tensor.dims.len()));
    }
    if let Some(v) = tensor.data.iter().find(|v| !v.is_finite()) {
        return Err(format!("tensor contains non-finite value {v}"));
    }
    let mut out = Vec::with_capacity(5 + 4 * tensor.dims.len() + 4 * tensor.data.len());
    out.extend_from_slice(MAGIC);
    out.push(tensor.dims.len() as u8);
    for &d in &tensor.dims {
        let d = u32::try_from(d).map_err(|_| format!("dimension {d} exceeds u32"))?;
        out.extend_from_slice(&d.to_le_bytes());
    }
    for &v in &tensor.data {
        let f = v as f32;
        if !f.is_finite() {
            return Err(format!("value {v} overflows float32"));
        }
        out.extend_from_slice(&f.to_le_bytes());
    }
    Ok(out)
}

pub fn decode_tensor(bytes: &[u8]) -> std::result::Result<Tensor, String> {
    if bytes.len() < 5 {
        return Err("file too short for an RDT1 header".into());
    }
    if &bytes[..4] != MAGIC {
        return Err(format!(
            "bad magic {:?}, expected \"RDT1\"",
            String::from_utf8_lossy(&bytes[..4])
        ));
    }
    let rank = bytes[4] as usize;
    let header = 5 + 4 * rank;
    if bytes.len() < header {
        return Err(format!(
            "truncated header: rank {rank} needs {header} bytes"
        ));
    }
    let dims: Vec<usize> = bytes[5..header]
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().unwrap()) as usize)
        .collect();
    let count = element_count(&dims)
        .filter(|n| n.checked_mul(4).is_some())
        .ok_or_else(|| format!("dims {dims:?} overflow"))?;
    let payload = &bytes[header..];
    if payload.len() != count * 4 {
        return Err(format!(
            "payload has {} bytes, dims {dims:?} need {}",
            payload.len(),
            count * 4
        ));
    }
    let data = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
        .collect();
    Ok(Tensor { dims, data })
}

pub fn write_tensor(path: &Path, tensor: &Tensor) -> Result<()> {
    let bytes = encode_tensor(tensor).map_err(|m| Error::format(path, m))?;
    write_atomic(path, &bytes)
}

pub fn read_tensor(path: &Path) -> Result<Tensor> {
    decode_tensor(&read_bytes(path)?).map_err(|m| Error::format(path, m))
}
