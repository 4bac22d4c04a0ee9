use alloc::string::String;
use core::fmt::Write;

use crate::{Error, Result};

/// Parameters of the cube-wise reconstruction. Defaults reproduce the
/// published parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FsrConfig {
    /// Edge length of the cubes that are reconstructed.
    pub cube_size: usize,
    /// Neighborhood added on every side of a cube.
    pub border_width: usize,
    /// Transform length per axis; must equal `cube_size + 2 * border_width`.
    pub fft_size: usize,
    /// Basis-function selections per cube.
    pub iterations: usize,
    /// Base of the spatial decay of the weighting function.
    pub rho_hat: f64,
    /// Orthogonality deficiency compensation applied to each coefficient.
    pub gamma: f64,
    /// Extra weight factor for previously reconstructed pixels.
    pub delta: f64,
    /// Controls how strongly the frequency prior reacts to missing data.
    pub tau: f64,
    /// Standard deviation of the Gaussian used to rank cubes.
    pub order_sigma: f64,
}

impl Default for FsrConfig {
    fn default() -> Self {
        Self {
            cube_size: 4,
            border_width: 14,
            fft_size: 32,
            iterations: 500,
            rho_hat: 0.7,
            gamma: 0.5,
            delta: 0.5,
            tau: 16.0,
            order_sigma: 4.0,
        }
    }
}

impl FsrConfig {
    /// Config with the given cube geometry and every other value at its default.
    /// `order_sigma` follows the cube size.
    pub fn with_geometry(cube_size: usize, border_width: usize) -> Self {
        Self {
            cube_size,
            border_width,
            fft_size: cube_size + 2 * border_width,
            order_sigma: cube_size as f64,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.cube_size == 0 {
            return Err(Error::InvalidConfig("cube_size must be positive"));
        }
        if self.cube_size + 2 * self.border_width != self.fft_size {
            return Err(Error::InvalidConfig(
                "fft_size must equal cube_size + 2 * border_width",
            ));
        }
        if !(self.rho_hat > 0.0 && self.rho_hat <= 1.0) {
            return Err(Error::InvalidConfig("rho_hat must lie in (0, 1]"));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::InvalidConfig("gamma must lie in (0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(Error::InvalidConfig("delta must lie in [0, 1]"));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidConfig("tau must be positive"));
        }
        if !(self.order_sigma > 0.0 && self.order_sigma.is_finite()) {
            return Err(Error::InvalidConfig("order_sigma must be positive"));
        }
        Ok(())
    }

    pub fn area_shape(&self) -> [usize; 3] {
        [self.fft_size; 3]
    }

    /// Canonical `key=value` listing used for fingerprints and manifests.
    pub fn canonical_string(&self) -> String {
        let mut s = String::new();
        let _ = write!(
            s,
            "cube_size={};border_width={};fft_size={};iterations={};rho_hat={:?};gamma={:?};delta={:?};tau={:?};order_sigma={:?}",
            self.cube_size,
            self.border_width,
            self.fft_size,
            self.iterations,
            self.rho_hat,
            self.gamma,
            self.delta,
            self.tau,
            self.order_sigma
        );
        s
    }
}
