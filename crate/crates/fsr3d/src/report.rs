//! CSV result tables.

use std::fs::{self, OpenOptions};
use std::path::Path;

use fsr3d_core::SamplingMode;

use crate::error::{Error, Result};

pub const COLUMNS: [&str; 7] = [
    "sequence", "density", "mode", "psnr_db", "mse", "runtime_s", "config",
];

/// One scored reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub struct PsnrReport {
    pub sequence: String,
    /// Empty in the CSV when unknown.
    pub density: Option<u32>,
    pub mode: Option<SamplingMode>,
    /// Positive infinity when `mse` is zero; written as `INF`.
    pub psnr_db: f64,
    pub mse: f64,
    pub runtime_s: f64,
    /// Method and config fingerprint, e.g. `fsr3d:0123abcd4567ef89`.
    pub config: String,
}

fn format_psnr(v: f64) -> String {
    if v == f64::INFINITY {
        "INF".to_string()
    } else {
        v.to_string()
    }
}

fn record(r: &PsnrReport) -> [String; 7] {
    [
        r.sequence.clone(),
        r.density.map(|d| d.to_string()).unwrap_or_default(),
        r.mode.map(|m| m.as_str().to_string()).unwrap_or_default(),
        format_psnr(r.psnr_db),
        r.mse.to_string(),
        r.runtime_s.to_string(),
        r.config.clone(),
    ]
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::format(path, format!("{other:?}")),
    }
}

fn write_rows<W: std::io::Write>(
    w: &mut csv::Writer<W>,
    path: &Path,
    header: bool,
    reports: &[PsnrReport],
) -> Result<()> {
    if header {
        w.write_record(COLUMNS).map_err(|e| csv_error(path, e))?;
    }
    for r in reports {
        w.write_record(record(r)).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes a fresh CSV: a header row and one row per report.
pub fn emit_report(reports: &[PsnrReport], path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_rows(&mut csv::Writer::from_writer(file), path, true, reports)
}

/// Appends rows, writing the header first if the file is new or empty.
pub fn append_report(reports: &[PsnrReport], path: &Path) -> Result<()> {
    let fresh = fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| Error::io(path, e))?;
    write_rows(&mut csv::Writer::from_writer(file), path, fresh, reports)
}

fn optional(s: &str) -> Option<&str> {
    (!s.is_empty()).then_some(s)
}

pub fn read_report(path: &Path) -> Result<Vec<PsnrReport>> {
    let mut rd = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let header = rd.headers().map_err(|e| csv_error(path, e))?.clone();
    if header.iter().ne(COLUMNS) {
        return Err(Error::format(path, format!("unexpected columns {header:?}")));
    }
    let bad = |line: usize, what: &str| Error::format(path, format!("row {line}: bad {what}"));
    let mut out = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = i + 2;
        let f = |k: usize| rec.get(k).unwrap_or("");
        out.push(PsnrReport {
            sequence: f(0).to_string(),
            density: optional(f(1)).map(str::parse).transpose().map_err(|_| bad(line, "density"))?,
            mode: optional(f(2)).map(str::parse).transpose().map_err(|_| bad(line, "mode"))?,
            psnr_db: if f(3) == "INF" {
                f64::INFINITY
            } else {
                f(3).parse().map_err(|_| bad(line, "psnr_db"))?
            },
            mse: f(4).parse().map_err(|_| bad(line, "mse"))?,
            runtime_s: f(5).parse().map_err(|_| bad(line, "runtime_s"))?,
            config: f(6).to_string(),
        });
    }
    Ok(out)
}
