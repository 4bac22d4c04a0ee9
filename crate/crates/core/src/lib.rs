//! Dynamic non-regular sampling and three-dimensional frequency selective
//! reconstruction (3D-FSR) of video volumes.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line front end and multi-threaded scheduling live in the `fsr3d` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
pub mod fft;
pub mod fsr;
pub mod metrics;
pub mod rng;
pub mod sampling;
pub mod volume;

pub use error::Error;
pub use fsr::{
    generate_model, plan_order, reconstruct, CubeOrigin, FsrConfig, ModelOutput,
    ReconstructionArea,
};
pub use metrics::{baseline_fill, psnr_volume, PsnrMeasure};
pub use sampling::{
    apply_mask, build_mask, gen_label_grid, make_schedule, LabelGrid, ReadoutSchedule,
    SamplingMode,
};
pub use volume::{crop_borders, Dims, Mask, Volume};

pub type Result<T, E = Error> = core::result::Result<T, E>;
