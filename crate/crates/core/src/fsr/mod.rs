//! Three-dimensional frequency selective reconstruction.
//!
//! The volume is split into cubes. For every cube that still holds missing
//! pixels, a window of `fft_size` samples per axis around it (the
//! reconstruction area) is approximated by a sparse superposition of 3D
//! Fourier basis functions chosen one at a time under a spatial weighting;
//! the model's real part then fills the cube's missing pixels. Cubes are
//! visited in decreasing order of locally available samples.

mod area;
mod config;
mod model;
pub mod oracle;
mod order;
mod prior;
mod reconstruct;

pub use area::{
    build_area, decay_weight, effective_data, AreaBuilder, Category, CubeOrigin,
    ReconstructionArea,
};
pub use config::FsrConfig;
pub use model::{
    generate_model, IterationStep, ModelEngine, ModelObserver, ModelOutput, NoObserver,
    Selection, TIE_TOLERANCE,
};
pub use order::{cube_origins, gaussian_kernel, plan_order};
pub use prior::{alpha, centered_index, frequency_prior, FrequencyPrior, PriorBase};
pub use reconstruct::{reconstruct, reconstruct_observed, Reconstruction, ReconstructObserver};
