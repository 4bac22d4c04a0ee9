//! Video volumes and binary sampling masks.
//!
//! Samples are stored frame-major and row-major within a frame, so the linear
//! index of `(x, y, t)` is `(t * height + y) * width + x`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// Extent of a volume in pixels and frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    pub width: usize,
    pub height: usize,
    pub frames: usize,
}

impl Dims {
    pub fn new(width: usize, height: usize, frames: usize) -> Result<Self> {
        let dims = Self {
            width,
            height,
            frames,
        };
        if width == 0 || height == 0 || frames == 0 {
            return Err(dims.invalid("every extent must be positive"));
        }
        Ok(dims)
    }

    pub fn len(&self) -> usize {
        self.width * self.height * self.frames
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn frame_len(&self) -> usize {
        self.width * self.height
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize, t: usize) -> usize {
        (t * self.height + y) * self.width + x
    }

    /// Index of a signed coordinate, or `None` outside the volume.
    #[inline]
    pub fn checked_index(&self, x: isize, y: isize, t: isize) -> Option<usize> {
        if x < 0 || y < 0 || t < 0 {
            return None;
        }
        let (x, y, t) = (x as usize, y as usize, t as usize);
        (x < self.width && y < self.height && t < self.frames).then(|| self.index(x, y, t))
    }

    pub(crate) fn invalid(&self, reason: &'static str) -> Error {
        Error::InvalidDims {
            width: self.width,
            height: self.height,
            frames: self.frames,
            reason,
        }
    }

    pub fn ensure_same(&self, other: &Dims) -> Result<()> {
        if self != other {
            return Err(Error::ShapeMismatch {
                left: *self,
                right: *other,
            });
        }
        Ok(())
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.width, self.height, self.frames)
    }
}

/// Luma volume `v[x, y, t]` held at working precision.
#[derive(Debug, Clone, PartialEq)]
pub struct Volume {
    dims: Dims,
    data: Vec<f64>,
}

impl Volume {
    pub fn new(dims: Dims, data: Vec<f64>) -> Result<Self> {
        if data.len() != dims.len() {
            return Err(Error::LengthMismatch {
                expected: dims.len(),
                actual: data.len(),
            });
        }
        Ok(Self { dims, data })
    }

    pub fn filled(dims: Dims, value: f64) -> Self {
        Self {
            dims,
            data: vec![value; dims.len()],
        }
    }

    pub fn from_fn(dims: Dims, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(dims.len());
        for t in 0..dims.frames {
            for y in 0..dims.height {
                for x in 0..dims.width {
                    data.push(f(x, y, t));
                }
            }
        }
        Self { dims, data }
    }

    /// Builds a volume from 8-bit samples in storage order.
    pub fn from_bytes(dims: Dims, bytes: &[u8]) -> Result<Self> {
        Self::new(dims, bytes.iter().map(|&b| f64::from(b)).collect())
    }

    /// Quantizes to 8 bits: round half away from zero, then clamp to `[0, 255]`.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.data.iter().map(|&v| quantize(v)).collect()
    }

    /// Copy of the volume with every sample passed through [`Volume::to_bytes`]
    /// quantization.
    pub fn quantized(&self) -> Self {
        Self {
            dims: self.dims,
            data: self.data.iter().map(|&v| f64::from(quantize(v))).collect(),
        }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, t: usize) -> f64 {
        self.data[self.dims.index(x, y, t)]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, t: usize, value: f64) {
        let i = self.dims.index(x, y, t);
        self.data[i] = value;
    }
}

#[inline]
fn quantize(v: f64) -> u8 {
    let r = libm::round(v);
    if r.is_nan() || r <= 0.0 {
        0
    } else if r >= 255.0 {
        255
    } else {
        r as u8
    }
}

/// Binary field marking acquired (`true`) and missing (`false`) positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    dims: Dims,
    bits: Vec<bool>,
}

impl Mask {
    pub fn new(dims: Dims, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != dims.len() {
            return Err(Error::LengthMismatch {
                expected: dims.len(),
                actual: bits.len(),
            });
        }
        Ok(Self { dims, bits })
    }

    pub fn filled(dims: Dims, value: bool) -> Self {
        Self {
            dims,
            bits: vec![value; dims.len()],
        }
    }

    pub fn from_fn(dims: Dims, mut f: impl FnMut(usize, usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(dims.len());
        for t in 0..dims.frames {
            for y in 0..dims.height {
                for x in 0..dims.width {
                    bits.push(f(x, y, t));
                }
            }
        }
        Self { dims, bits }
    }

    /// Reads one byte per sample; any nonzero byte counts as acquired.
    pub fn from_bytes(dims: Dims, bytes: &[u8]) -> Result<Self> {
        Self::new(dims, bytes.iter().map(|&b| b != 0).collect())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        self.bits.iter().map(|&b| u8::from(b)).collect()
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }

    pub fn as_mut_slice(&mut self) -> &mut [bool] {
        &mut self.bits
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, t: usize) -> bool {
        self.bits[self.dims.index(x, y, t)]
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn frame_count_ones(&self, t: usize) -> usize {
        let n = self.dims.frame_len();
        self.bits[t * n..(t + 1) * n].iter().filter(|&&b| b).count()
    }

    pub fn is_full(&self) -> bool {
        self.bits.iter().all(|&b| b)
    }
}

/// Interior window with `spatial_border` pixels removed on each side of both
/// spatial axes and `temporal_border` frames removed at each end.
pub fn crop_borders(volume: &Volume, spatial_border: usize, temporal_border: usize) -> Result<Volume> {
    let dims = volume.dims();
    let inner = cropped_dims(dims, spatial_border, temporal_border)?;
    let mut data = Vec::with_capacity(inner.len());
    for t in temporal_border..temporal_border + inner.frames {
        for y in spatial_border..spatial_border + inner.height {
            let start = dims.index(spatial_border, y, t);
            data.extend_from_slice(&volume.as_slice()[start..start + inner.width]);
        }
    }
    Volume::new(inner, data)
}

pub(crate) fn cropped_dims(dims: Dims, spatial: usize, temporal: usize) -> Result<Dims> {
    if 2 * spatial >= dims.width.min(dims.height) || 2 * temporal >= dims.frames {
        return Err(Error::BorderTooLarge {
            spatial,
            temporal,
            dims,
        });
    }
    Ok(Dims {
        width: dims.width - 2 * spatial,
        height: dims.height - 2 * spatial,
        frames: dims.frames - 2 * temporal,
    })
}
