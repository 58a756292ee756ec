//! Binary greyscale PGM (P5), maxval 255 or 65535.

use std::path::Path;

use dealias_core::ImageGrid;

use crate::error::{Error, Result};
use crate::fsutil::{read_bytes, write_atomic};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitDepth {
    Eight,
    Sixteen,
}

impl BitDepth {
    pub fn maxval(self) -> u32 {
        match self {
            BitDepth::Eight => 255,
            BitDepth::Sixteen => 65535,
        }
    }
}

impl TryFrom<u32> for BitDepth {
    type Error = Error;

    fn try_from(bits: u32) -> Result<Self> {
        match bits {
            8 => Ok(BitDepth::Eight),
            16 => Ok(BitDepth::Sixteen),
            other => Err(Error::usage(format!(
                "bit depth must be 8 or 16, got {other}"
            ))),
        }
    }
}

/// Linearly maps `[min, max]` onto `[0, maxval]`; a constant image maps to 0.
pub fn encode_pgm(image: &ImageGrid, depth: BitDepth) -> Result<Vec<u8>> {
    let (lo, hi) = image.min_max();
    encode_pgm_range(image, depth, lo, hi)
}

/// Like [`encode_pgm`] with an explicit `[lo, hi]`; values outside clamp.
pub fn encode_pgm_range(image: &ImageGrid, depth: BitDepth, lo: f64, hi: f64) -> Result<Vec<u8>> {
    if image.is_empty() {
        return Err(
            dealias_core::Error::InvalidArgument("cannot export a zero-area image".into()).into(),
        );
    }
    let range = hi - lo;
    let maxval = depth.maxval();
    let mut out = format!("P5\n{} {}\n{}\n", image.width(), image.height(), maxval).into_bytes();
    for &v in image.data() {
        let level = if range > 0.0 {
            ((v - lo) / range * maxval as f64)
                .round()
                .clamp(0.0, maxval as f64) as u32
        } else {
            0
        };
        match depth {
            BitDepth::Eight => out.push(level as u8),
            BitDepth::Sixteen => out.extend_from_slice(&(level as u16).to_be_bytes()),
        }
    }
    Ok(out)
}

pub fn write_pgm(path: &Path, image: &ImageGrid, depth: BitDepth) -> Result<()> {
    write_atomic(path, &encode_pgm(image, depth)?)
}

pub fn write_pgm_range(
    path: &Path,
    image: &ImageGrid,
    depth: BitDepth,
    lo: f64,
    hi: f64,
) -> Result<()> {
    write_atomic(path, &encode_pgm_range(image, depth, lo, hi)?)
}

/// Parses a P5 file into `[0, 1]` by dividing by maxval.
pub fn decode_pgm(bytes: &[u8]) -> std::result::Result<ImageGrid, String> {
    let mut pos = 0;
    let mut fields = Vec::with_capacity(4);
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err("truncated PGM header".into());
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| "non-ascii PGM header")?);
    }
    if fields[0] != "P5" {
        return Err(format!("unsupported PGM magic {:?}", fields[0]));
    }
    let num = |s: &str, what: &str| {
        s.parse::<usize>()
            .map_err(|_| format!("bad PGM {what} {s:?}"))
    };
    let (w, h, maxval) = (
        num(fields[1], "width")?,
        num(fields[2], "height")?,
        num(fields[3], "maxval")?,
    );
    if w == 0 || h == 0 || maxval == 0 || maxval > 65535 {
        return Err(format!("invalid PGM geometry {w}x{h} maxval {maxval}"));
    }
    // exactly one whitespace byte separates header and raster
    pos += 1;
    let bpp = if maxval > 255 { 2 } else { 1 };
    let raster = bytes.get(pos..).unwrap_or(&[]);
    if raster.len() != w * h * bpp {
        return Err(format!(
            "PGM raster has {} bytes, expected {}",
            raster.len(),
            w * h * bpp
        ));
    }
    let data = if bpp == 1 {
        raster.iter().map(|&b| b as f64 / maxval as f64).collect()
    } else {
        raster
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]) as f64 / maxval as f64)
            .collect()
    };
    ImageGrid::new(h, w, data).map_err(|e| e.to_string())
}

pub fn read_pgm(path: &Path) -> Result<ImageGrid> {
    decode_pgm(&read_bytes(path)?).map_err(|m| Error::format(path, m))
}
