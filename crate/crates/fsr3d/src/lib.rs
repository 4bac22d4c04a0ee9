//! File formats, configuration files, reports, threaded scheduling and the
//! command line pipeline around [`fsr3d_core`].

mod error;
pub mod config_file;
pub mod io;
pub mod manifest;
pub mod parallel;
pub mod pipeline;
pub mod report;
pub mod synthetic;

pub use error::{Error, Result};
pub use fsr3d_core as core;
