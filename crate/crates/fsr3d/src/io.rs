//! Headerless 8-bit raw files with a JSON sidecar.
//!
//! `clip.gray8` is described by `clip.json`:
//! `{"width":W,"height":H,"frames":F,"bit_depth":8}`. Samples are stored
//! frame after frame, rows top to bottom, one byte per sample. Masks use the
//! same layout with `"bit_depth":"binary"` and bytes 0 or 1; label grids use
//! `"bit_depth":"labels"` and a single frame.

use std::fs;
use std::path::{Path, PathBuf};

use fsr3d_core::{Dims, LabelGrid, Mask, Volume};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub const LAYOUT: &str = "frame-major, row-major, 1 byte per sample";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Value", into = "Value")]
pub enum SampleFormat {
    Gray8,
    Binary,
    Labels,
}

impl TryFrom<Value> for SampleFormat {
    type Error = String;

    fn try_from(v: Value) -> Result<Self, String> {
        match &v {
            Value::Number(n) if n.as_u64() == Some(8) => Ok(SampleFormat::Gray8),
            Value::String(s) if s == "binary" => Ok(SampleFormat::Binary),
            Value::String(s) if s == "labels" => Ok(SampleFormat::Labels),
            _ => Err(format!("unsupported bit_depth {v}")),
        }
    }
}

impl From<SampleFormat> for Value {
    fn from(f: SampleFormat) -> Value {
        match f {
            SampleFormat::Gray8 => Value::from(8),
            SampleFormat::Binary => Value::from("binary"),
            SampleFormat::Labels => Value::from("labels"),
        }
    }
}

fn gray8() -> SampleFormat {
    SampleFormat::Gray8
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Header {
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    #[serde(default = "gray8")]
    pub bit_depth: SampleFormat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<String>,
}

impl Header {
    pub fn new(dims: Dims, bit_depth: SampleFormat) -> Self {
        Self {
            width: dims.width,
            height: dims.height,
            frames: dims.frames,
            bit_depth,
            layout: Some(LAYOUT.to_string()),
        }
    }

    pub fn dims(&self) -> Result<Dims> {
        Ok(Dims::new(self.width, self.height, self.frames)?)
    }
}

/// A decoded file plus the number of bytes found past the expected end.
#[derive(Debug, Clone)]
pub struct Loaded<T> {
    pub value: T,
    pub trailing_bytes: usize,
}

impl<T> Loaded<T> {
    /// Human readable note when the file was longer than its header claims.
    pub fn warning(&self, path: &Path) -> Option<String> {
        (self.trailing_bytes > 0).then(|| {
            format!(
                "warning: {}: ignored {} trailing bytes",
                path.display(),
                self.trailing_bytes
            )
        })
    }
}

/// `clip.gray8` -> `clip.json`.
pub fn sidecar_path(data: &Path) -> PathBuf {
    data.with_extension("json")
}

pub fn read_header(data: &Path) -> Result<Header> {
    let path = sidecar_path(data);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::format(&path, e.to_string()))
}

pub fn write_header(data: &Path, header: &Header) -> Result<()> {
    let path = sidecar_path(data);
    let mut text = serde_json::to_string_pretty(header).expect("header serializes");
    text.push('\n');
    fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

fn read_exact(path: &Path, expected: usize) -> Result<(Vec<u8>, usize)> {
    let mut bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() < expected {
        return Err(Error::format(
            path,
            format!("file too short: {} bytes, expected {}", bytes.len(), expected),
        ));
    }
    let trailing = bytes.len() - expected;
    bytes.truncate(expected);
    Ok((bytes, trailing))
}

fn write_raw(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn check_format(path: &Path, header: &Header, want: SampleFormat) -> Result<()> {
    if header.bit_depth != want {
        return Err(Error::format(
            sidecar_path(path),
            format!("expected bit_depth {}, found {}", Value::from(want), Value::from(header.bit_depth)),
        ));
    }
    Ok(())
}

/// Loads a volume with explicitly given dimensions.
pub fn load_volume_with(path: &Path, dims: Dims) -> Result<Loaded<Volume>> {
    let (bytes, trailing) = read_exact(path, dims.len())?;
    Ok(Loaded {
        value: Volume::from_bytes(dims, &bytes)?,
        trailing_bytes: trailing,
    })
}

/// Loads a volume described by its sidecar.
pub fn load_volume(path: &Path) -> Result<Loaded<Volume>> {
    let header = read_header(path)?;
    check_format(path, &header, SampleFormat::Gray8)?;
    load_volume_with(path, header.dims()?)
}

/// Writes the volume rounded and clamped to 8 bits, plus its sidecar.
pub fn save_volume(path: &Path, volume: &Volume) -> Result<()> {
    write_raw(path, &volume.to_bytes())?;
    write_header(path, &Header::new(volume.dims(), SampleFormat::Gray8))
}

pub fn load_mask(path: &Path) -> Result<Loaded<Mask>> {
    let header = read_header(path)?;
    check_format(path, &header, SampleFormat::Binary)?;
    let dims = header.dims()?;
    let (bytes, trailing) = read_exact(path, dims.len())?;
    if let Some(pos) = bytes.iter().position(|&b| b > 1) {
        return Err(Error::format(
            path,
            format!("mask byte {} at offset {pos} is not 0 or 1", bytes[pos]),
        ));
    }
    Ok(Loaded {
        value: Mask::from_bytes(dims, &bytes)?,
        trailing_bytes: trailing,
    })
}

pub fn save_mask(path: &Path, mask: &Mask) -> Result<()> {
    write_raw(path, &mask.to_bytes())?;
    write_header(path, &Header::new(mask.dims(), SampleFormat::Binary))
}

pub fn load_labels(path: &Path) -> Result<Loaded<LabelGrid>> {
    let header = read_header(path)?;
    check_format(path, &header, SampleFormat::Labels)?;
    if header.frames != 1 {
        return Err(Error::format(sidecar_path(path), "label grid must have one frame"));
    }
    let (bytes, trailing) = read_exact(path, header.width * header.height)?;
    Ok(Loaded {
        value: LabelGrid::from_labels(header.width, header.height, bytes)?,
        trailing_bytes: trailing,
    })
}

pub fn save_labels(path: &Path, grid: &LabelGrid) -> Result<()> {
    write_raw(path, &grid.to_bytes())?;
    let dims = Dims::new(grid.width(), grid.height(), 1)?;
    write_header(path, &Header::new(dims, SampleFormat::Labels))
}

/// Reads the luma planes of a planar YUV 4:2:0 file; chroma is discarded.
/// A partial frame at the end counts as trailing bytes.
pub fn import_yuv420(path: &Path, width: usize, height: usize) -> Result<Loaded<Volume>> {
    if !width.is_multiple_of(2) || !height.is_multiple_of(2) {
        return Err(Error::Usage(format!(
            "4:2:0 input needs even dimensions, got {width}x{height}"
        )));
    }
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let luma = width * height;
    let frame = luma + luma / 2;
    let frames = bytes.len() / frame;
    if frames == 0 {
        return Err(Error::format(
            path,
            format!("file too short: {} bytes, one frame needs {frame}", bytes.len()),
        ));
    }
    let dims = Dims::new(width, height, frames)?;
    let mut plane = Vec::with_capacity(dims.len());
    for f in 0..frames {
        plane.extend_from_slice(&bytes[f * frame..f * frame + luma]);
    }
    Ok(Loaded {
        value: Volume::from_bytes(dims, &plane)?,
        trailing_bytes: bytes.len() - frames * frame,
    })
}

/// SHA-256 of a file's contents as lowercase hex.
pub fn file_digest(path: &Path) -> Result<String> {
    use sha2::{Digest, Sha256};
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}
