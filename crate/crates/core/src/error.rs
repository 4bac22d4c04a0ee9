use crate::fsr::CubeOrigin;
use crate::volume::Dims;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid dimensions {width}x{height}x{frames}: {reason}")]
    InvalidDims {
        width: usize,
        height: usize,
        frames: usize,
        reason: &'static str,
    },
    #[error("shape mismatch: {left} vs {right}")]
    ShapeMismatch { left: Dims, right: Dims },
    #[error("sample buffer holds {actual} values, expected {expected}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("border ({spatial}, {temporal}) consumes the whole extent of {dims}")]
    BorderTooLarge {
        spatial: usize,
        temporal: usize,
        dims: Dims,
    },
    #[error("unsupported sampling density {0}% (expected 25, 50 or 75)")]
    UnsupportedDensity(u32),
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("effective data measure must lie in (0, 1], got {0}")]
    InvalidOmega(f64),
    #[error("reconstruction area of cube at {0} holds no known or reconstructed pixel")]
    DegenerateCube(CubeOrigin),
}
