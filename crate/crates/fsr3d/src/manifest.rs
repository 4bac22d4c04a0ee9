//! JSON run manifests: everything needed to repeat a run bit-exactly.

use std::fs;
use std::path::Path;

use fsr3d_core::{FsrConfig, ReadoutSchedule};
use serde_json::{json, Value};

use crate::config_file::fingerprint;
use crate::error::{Error, Result};
use crate::io::file_digest;

pub const TOOL: &str = concat!("fsr3d ", env!("CARGO_PKG_VERSION"));

pub fn config_json(cfg: &FsrConfig) -> Value {
    json!({
        "cube_size": cfg.cube_size,
        "border_width": cfg.border_width,
        "fft_size": cfg.fft_size,
        "iterations": cfg.iterations,
        "rho_hat": cfg.rho_hat,
        "gamma": cfg.gamma,
        "delta": cfg.delta,
        "tau": cfg.tau,
        "order_sigma": cfg.order_sigma,
        "fingerprint": fingerprint(cfg),
    })
}

pub fn schedule_json(schedule: &ReadoutSchedule) -> Value {
    json!({
        "density": schedule.density(),
        "period": schedule.period(),
        "frame_sets": schedule.frame_sets().iter().map(|s| s.labels()).collect::<Vec<_>>(),
    })
}

/// Path and SHA-256 of an existing file.
pub fn file_entry(path: &Path) -> Result<Value> {
    Ok(json!({
        "path": path.display().to_string(),
        "sha256": file_digest(path)?,
    }))
}

pub fn write_manifest(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("manifest serializes");
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_manifest(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::format(path, e.to_string()))
}
