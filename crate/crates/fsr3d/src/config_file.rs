//! `key = value` configuration files and layered overrides.
//!
//! Keys are the [`FsrConfig`] field names. Blank lines and lines starting
//! with `#` are ignored. Values set on the command line win over the file,
//! which wins over the defaults.

use std::fs;
use std::path::Path;

use fsr3d_core::FsrConfig;

use crate::error::{Error, Result};

/// Optional value per config field.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FsrOverrides {
    pub cube_size: Option<usize>,
    pub border_width: Option<usize>,
    pub fft_size: Option<usize>,
    pub iterations: Option<usize>,
    pub rho_hat: Option<f64>,
    pub gamma: Option<f64>,
    pub delta: Option<f64>,
    pub tau: Option<f64>,
    pub order_sigma: Option<f64>,
}

impl FsrOverrides {
    /// Fields set in `self` take precedence over `lower`.
    pub fn over(self, lower: FsrOverrides) -> FsrOverrides {
        FsrOverrides {
            cube_size: self.cube_size.or(lower.cube_size),
            border_width: self.border_width.or(lower.border_width),
            fft_size: self.fft_size.or(lower.fft_size),
            iterations: self.iterations.or(lower.iterations),
            rho_hat: self.rho_hat.or(lower.rho_hat),
            gamma: self.gamma.or(lower.gamma),
            delta: self.delta.or(lower.delta),
            tau: self.tau.or(lower.tau),
            order_sigma: self.order_sigma.or(lower.order_sigma),
        }
    }

    /// Applies the overrides to the defaults. An unset `fft_size` follows
    /// the geometry and an unset `order_sigma` follows the cube size.
    pub fn resolve(&self) -> Result<FsrConfig> {
        let d = FsrConfig::default();
        let cube = self.cube_size.unwrap_or(d.cube_size);
        let border = self.border_width.unwrap_or(d.border_width);
        let mut cfg = FsrConfig::with_geometry(cube, border);
        if let Some(v) = self.fft_size {
            cfg.fft_size = v;
        }
        if let Some(v) = self.iterations {
            cfg.iterations = v;
        }
        if let Some(v) = self.rho_hat {
            cfg.rho_hat = v;
        }
        if let Some(v) = self.gamma {
            cfg.gamma = v;
        }
        if let Some(v) = self.delta {
            cfg.delta = v;
        }
        if let Some(v) = self.tau {
            cfg.tau = v;
        }
        if let Some(v) = self.order_sigma {
            cfg.order_sigma = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn int(v: &str) -> std::result::Result<usize, String> {
            v.parse().map_err(|_| format!("expected a non-negative integer, got {v:?}"))
        }
        fn real(v: &str) -> std::result::Result<f64, String> {
            v.parse().map_err(|_| format!("expected a number, got {v:?}"))
        }
        match key {
            "cube_size" => self.cube_size = Some(int(value)?),
            "border_width" => self.border_width = Some(int(value)?),
            "fft_size" => self.fft_size = Some(int(value)?),
            "iterations" => self.iterations = Some(int(value)?),
            "rho_hat" => self.rho_hat = Some(real(value)?),
            "gamma" => self.gamma = Some(real(value)?),
            "delta" => self.delta = Some(real(value)?),
            "tau" => self.tau = Some(real(value)?),
            "order_sigma" => self.order_sigma = Some(real(value)?),
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }
}

pub fn parse_config(text: &str) -> std::result::Result<FsrOverrides, String> {
    let mut out = FsrOverrides::default();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key = value", no + 1))?;
        out.set(key.trim(), value.trim())
            .map_err(|e| format!("line {}: {e}", no + 1))?;
    }
    Ok(out)
}

pub fn load_config(path: &Path) -> Result<FsrOverrides> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text).map_err(|e| Error::format(path, e))
}

/// Renders a config in the file format; parsing it back gives the same values.
pub fn render_config(cfg: &FsrConfig) -> String {
    format!(
        "cube_size = {}\nborder_width = {}\nfft_size = {}\niterations = {}\nrho_hat = {}\ngamma = {}\ndelta = {}\ntau = {}\norder_sigma = {}\n",
        cfg.cube_size,
        cfg.border_width,
        cfg.fft_size,
        cfg.iterations,
        cfg.rho_hat,
        cfg.gamma,
        cfg.delta,
        cfg.tau,
        cfg.order_sigma
    )
}

/// First 16 hex digits of the SHA-256 of the canonical config string.
pub fn fingerprint(cfg: &FsrConfig) -> String {
    use sha2::{Digest, Sha256};
    let digest = Sha256::digest(cfg.canonical_string().as_bytes());
    hex::encode(digest)[..16].to_string()
}
