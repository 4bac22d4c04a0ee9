//! The sample, reconstruct, evaluate and pipeline commands.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use fsr3d_core::sampling::{build_mask_with, MaskOptions};
use fsr3d_core::{
    apply_mask, baseline_fill, gen_label_grid, make_schedule, psnr_volume, Dims, FsrConfig,
    LabelGrid, Mask, ReadoutSchedule, SamplingMode, Volume,
};
use serde_json::{json, Value};

use crate::config_file::fingerprint;
use crate::error::{Error, Result};
use crate::io::{self, Loaded};
use crate::manifest::{config_json, file_entry, schedule_json, write_manifest, TOOL};
use crate::parallel::{reconstruct_threaded, Progress};
use crate::report::{emit_report, append_report, PsnrReport};

pub const SAMPLED_FILE: &str = "sampled.gray8";
pub const MASK_FILE: &str = "mask.gray8";
pub const LABELS_FILE: &str = "labels.gray8";
pub const SAMPLE_MANIFEST: &str = "sample_manifest.json";
pub const FSR_FILE: &str = "fsr.gray8";
pub const BASELINE_FILE: &str = "baseline.gray8";
pub const REPORT_FILE: &str = "report.csv";
pub const PIPELINE_MANIFEST: &str = "pipeline_manifest.json";

/// Raw input clip, described by its sidecar unless dimensions are given.
#[derive(Debug, Clone, PartialEq)]
pub struct InputSpec {
    pub path: PathBuf,
    pub dims: Option<Dims>,
}

impl InputSpec {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Self {
            path: path.into(),
            dims: None,
        }
    }

    pub fn load(&self) -> Result<Volume> {
        let loaded = match self.dims {
            Some(d) => io::load_volume_with(&self.path, d)?,
            None => io::load_volume(&self.path)?,
        };
        Ok(warn_trailing(&self.path, loaded))
    }
}

fn warn_trailing<T>(path: &Path, loaded: Loaded<T>) -> T {
    if let Some(w) = loaded.warning(path) {
        eprintln!("{w}");
    }
    loaded.value
}

/// Sampling parameters shared by `sample` and `pipeline`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplingSpec {
    pub density: u32,
    pub mode: SamplingMode,
    pub seed: u64,
    /// Shuffles the canonical readout order when set.
    pub schedule_seed: Option<u64>,
    pub row_offsets: bool,
}

impl SamplingSpec {
    pub fn validate(&self) -> Result<ReadoutSchedule> {
        make_schedule(self.density, self.schedule_seed)
            .map_err(|_| Error::Usage(format!("density must be 25, 50 or 75, got {}", self.density)))
    }

    fn json(&self) -> Value {
        json!({
            "density": self.density,
            "mode": self.mode.as_str(),
            "seed": self.seed,
            "schedule_seed": self.schedule_seed,
            "row_offsets": self.row_offsets,
        })
    }
}

/// Result of sampling a clip in memory.
#[derive(Debug, Clone)]
pub struct Sampled {
    pub grid: LabelGrid,
    pub schedule: ReadoutSchedule,
    pub mask: Mask,
    pub volume: Volume,
}

pub fn sample_volume(original: &Volume, spec: &SamplingSpec) -> Result<Sampled> {
    let schedule = spec.validate()?;
    let dims = original.dims();
    let grid = gen_label_grid(dims.width, dims.height, spec.seed)?;
    let mask = build_mask_with(
        &grid,
        &schedule,
        MaskOptions {
            mode: spec.mode,
            frames: dims.frames,
            seed: spec.seed,
            row_offsets: spec.row_offsets,
        },
    )?;
    let (volume, mask) = apply_mask(original, &mask)?;
    Ok(Sampled {
        grid,
        schedule,
        mask,
        volume,
    })
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_sampled(dir: &Path, input: &Path, spec: &SamplingSpec, s: &Sampled) -> Result<()> {
    create_dir(dir)?;
    let sampled = dir.join(SAMPLED_FILE);
    let mask = dir.join(MASK_FILE);
    let labels = dir.join(LABELS_FILE);
    io::save_volume(&sampled, &s.volume)?;
    io::save_mask(&mask, &s.mask)?;
    io::save_labels(&labels, &s.grid)?;
    let manifest = json!({
        "tool": TOOL,
        "command": "sample",
        "input": file_entry(input)?,
        "sampling": spec.json(),
        "schedule": schedule_json(&s.schedule),
        "outputs": {
            "sampled": file_entry(&sampled)?,
            "mask": file_entry(&mask)?,
            "labels": file_entry(&labels)?,
        },
    });
    write_manifest(&dir.join(SAMPLE_MANIFEST), &manifest)
}

/// Samples `input` and writes the sampled clip, mask, label grid and a
/// manifest into `out_dir`.
pub fn cmd_sample(input: &InputSpec, spec: &SamplingSpec, out_dir: &Path) -> Result<Sampled> {
    spec.validate()?;
    let original = input.load()?;
    let sampled = sample_volume(&original, spec)?;
    write_sampled(out_dir, &input.path, spec, &sampled)?;
    Ok(sampled)
}

/// Prints `stage: done/total cubes` to stderr at every tenth of the work.
pub struct StderrProgress {
    stage: String,
    last: usize,
}

impl StderrProgress {
    pub fn new(stage: impl Into<String>) -> Self {
        Self {
            stage: stage.into(),
            last: 0,
        }
    }
}

impl Progress for StderrProgress {
    fn cubes_done(&mut self, done: usize, total: usize) {
        let tenth = done * 10 / total.max(1);
        if tenth > self.last || done == total {
            self.last = tenth;
            eprintln!("{}: {done}/{total} cubes", self.stage);
            let _ = std::io::stderr().flush();
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructSpec {
    pub sampled: PathBuf,
    pub mask: PathBuf,
    pub output: PathBuf,
    pub config: FsrConfig,
    pub threads: usize,
    pub progress: bool,
}

/// Manifest written next to a reconstructed clip: `fsr.gray8` ->
/// `fsr.manifest.json`.
pub fn reconstruct_manifest_path(output: &Path) -> PathBuf {
    output.with_extension("manifest.json")
}

/// Full precision reconstruction plus its wall-clock time.
pub fn run_reconstruction(
    sampled: &Volume,
    mask: &Mask,
    config: &FsrConfig,
    threads: usize,
    progress: &mut dyn Progress,
) -> Result<(Volume, f64)> {
    let start = Instant::now();
    let volume = reconstruct_threaded(sampled, mask, config, threads, progress)?;
    Ok((volume, start.elapsed().as_secs_f64()))
}

pub fn cmd_reconstruct(spec: &ReconstructSpec) -> Result<Volume> {
    spec.config.validate()?;
    let sampled = warn_trailing(&spec.sampled, io::load_volume(&spec.sampled)?);
    let mask = warn_trailing(&spec.mask, io::load_mask(&spec.mask)?);
    if sampled.dims() != mask.dims() {
        return Err(Error::Usage(format!(
            "sampled clip is {} but mask is {}",
            sampled.dims(),
            mask.dims()
        )));
    }
    let mut progress: Box<dyn Progress> = if spec.progress {
        Box::new(StderrProgress::new("reconstruct"))
    } else {
        Box::new(())
    };
    let (volume, runtime) = run_reconstruction(&sampled, &mask, &spec.config, spec.threads, &mut *progress)?;
    io::save_volume(&spec.output, &volume)?;
    let manifest = json!({
        "tool": TOOL,
        "command": "reconstruct",
        "inputs": {
            "sampled": file_entry(&spec.sampled)?,
            "mask": file_entry(&spec.mask)?,
        },
        "config": config_json(&spec.config),
        "threads": spec.threads,
        "runtime_s": runtime,
        "output": file_entry(&spec.output)?,
    });
    write_manifest(&reconstruct_manifest_path(&spec.output), &manifest)?;
    Ok(volume)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluateSpec {
    pub reference: InputSpec,
    pub test: InputSpec,
    pub spatial_border: usize,
    pub temporal_border: usize,
    pub sequence: String,
    pub density: Option<u32>,
    pub mode: Option<SamplingMode>,
    pub config: String,
    pub report: Option<PathBuf>,
}

pub fn cmd_evaluate(spec: &EvaluateSpec) -> Result<PsnrReport> {
    let reference = spec.reference.load()?;
    let test = spec.test.load()?;
    if reference.dims() != test.dims() {
        return Err(Error::Usage(format!(
            "{} is {} but {} is {}",
            spec.reference.path.display(),
            reference.dims(),
            spec.test.path.display(),
            test.dims()
        )));
    }
    let m = psnr_volume(&reference, &test, spec.spatial_border, spec.temporal_border)?;
    let report = PsnrReport {
        sequence: spec.sequence.clone(),
        density: spec.density,
        mode: spec.mode,
        psnr_db: m.psnr_db(),
        mse: m.mse,
        runtime_s: 0.0,
        config: spec.config.clone(),
    };
    if let Some(path) = &spec.report {
        append_report(std::slice::from_ref(&report), path)?;
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineSpec {
    pub input: InputSpec,
    /// Name used in the report; defaults to the input file stem.
    pub sequence: Option<String>,
    pub density: u32,
    pub modes: Vec<SamplingMode>,
    pub seed: u64,
    pub schedule_seed: Option<u64>,
    pub row_offsets: bool,
    pub config: FsrConfig,
    pub threads: usize,
    pub out_dir: PathBuf,
    pub baseline: bool,
    pub spatial_border: usize,
    pub temporal_border: usize,
    /// Record measured runtimes; when off every runtime is written as 0 so
    /// repeated runs produce identical reports.
    pub timing: bool,
    pub progress: bool,
}

impl PipelineSpec {
    pub fn sequence_name(&self) -> String {
        self.sequence.clone().unwrap_or_else(|| {
            self.input
                .path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "sequence".to_string())
        })
    }

    fn sampling(&self, mode: SamplingMode) -> SamplingSpec {
        SamplingSpec {
            density: self.density,
            mode,
            seed: self.seed,
            schedule_seed: self.schedule_seed,
            row_offsets: self.row_offsets,
        }
    }

    /// Checks everything that can be checked without reading the input.
    pub fn validate(&self) -> Result<()> {
        self.sampling(SamplingMode::Static).validate()?;
        if self.modes.is_empty() {
            return Err(Error::Usage("at least one sampling mode is required".into()));
        }
        self.config.validate()?;
        if !self.input.path.is_file() {
            return Err(Error::io(
                &self.input.path,
                std::io::Error::new(std::io::ErrorKind::NotFound, "input not found"),
            ));
        }
        Ok(())
    }

    /// Fully resolved settings, as printed by a dry run.
    pub fn describe(&self) -> Value {
        json!({
            "input": self.input.path.display().to_string(),
            "dims": self.input.dims.map(|d| d.to_string()),
            "sequence": self.sequence_name(),
            "density": self.density,
            "modes": self.modes.iter().map(|m| m.as_str()).collect::<Vec<_>>(),
            "seed": self.seed,
            "schedule_seed": self.schedule_seed,
            "row_offsets": self.row_offsets,
            "config": config_json(&self.config),
            "threads": self.threads,
            "out_dir": self.out_dir.display().to_string(),
            "baseline": self.baseline,
            "spatial_border": self.spatial_border,
            "temporal_border": self.temporal_border,
            "timing": self.timing,
        })
    }
}

/// Runs sample, reconstruct, optional baseline fill and evaluation for every
/// mode and writes `report.csv` with all rows. Output layout:
/// `<out>/<mode>/{sampled,mask,labels,fsr,baseline}.gray8`, per-mode
/// manifests, `<out>/report.csv` and `<out>/pipeline_manifest.json`.
pub fn cmd_pipeline(spec: &PipelineSpec) -> Result<Vec<PsnrReport>> {
    spec.validate()?;
    let original = spec.input.load().map_err(|e| e.in_stage("sample"))?;
    let sequence = spec.sequence_name();
    let fsr_label = format!("fsr3d:{}", fingerprint(&spec.config));
    create_dir(&spec.out_dir)?;
    let mut reports = Vec::new();
    let mut runs = Vec::new();

    for &mode in &spec.modes {
        let sampling = spec.sampling(mode);
        let dir = spec.out_dir.join(mode.as_str());
        let sampled = sample_volume(&original, &sampling)
            .and_then(|s| write_sampled(&dir, &spec.input.path, &sampling, &s).map(|_| s))
            .map_err(|e| e.in_stage("sample"))?;

        let mut progress: Box<dyn Progress> = if spec.progress {
            Box::new(StderrProgress::new(format!("reconstruct {mode}")))
        } else {
            Box::new(())
        };
        let (fsr, runtime) = run_reconstruction(
            &sampled.volume,
            &sampled.mask,
            &spec.config,
            spec.threads,
            &mut *progress,
        )
        .map_err(|e| e.in_stage("reconstruct"))?;
        let runtime = if spec.timing { runtime } else { 0.0 };
        let fsr_path = dir.join(FSR_FILE);
        io::save_volume(&fsr_path, &fsr).map_err(|e| e.in_stage("reconstruct"))?;

        let mut score = |test: &Volume, config: &str, runtime: f64| -> Result<()> {
            let m = psnr_volume(&original, test, spec.spatial_border, spec.temporal_border)
                .map_err(|e| Error::from(e).in_stage("evaluate"))?;
            reports.push(PsnrReport {
                sequence: sequence.clone(),
                density: Some(spec.density),
                mode: Some(mode),
                psnr_db: m.psnr_db(),
                mse: m.mse,
                runtime_s: runtime,
                config: config.to_string(),
            });
            Ok(())
        };
        score(&fsr, &fsr_label, runtime)?;

        let mut outputs = json!({ "fsr": file_entry(&fsr_path)? });
        if spec.baseline {
            let start = Instant::now();
            let filled = baseline_fill(&sampled.volume, &sampled.mask)
                .map_err(|e| Error::from(e).in_stage("baseline"))?;
            let elapsed = if spec.timing { start.elapsed().as_secs_f64() } else { 0.0 };
            let path = dir.join(BASELINE_FILE);
            io::save_volume(&path, &filled).map_err(|e| e.in_stage("baseline"))?;
            score(&filled, "baseline_fill", elapsed)?;
            outputs["baseline"] = file_entry(&path)?;
        }
        runs.push(json!({
            "mode": mode.as_str(),
            "sample_manifest": dir.join(SAMPLE_MANIFEST).display().to_string(),
            "outputs": outputs,
            "runtime_s": runtime,
        }));
    }

    let report_path = spec.out_dir.join(REPORT_FILE);
    emit_report(&reports, &report_path).map_err(|e| e.in_stage("evaluate"))?;
    let manifest = json!({
        "tool": TOOL,
        "command": "pipeline",
        "input": file_entry(&spec.input.path)?,
        "spec": spec.describe(),
        "runs": runs,
        "report": file_entry(&report_path)?,
    });
    write_manifest(&spec.out_dir.join(PIPELINE_MANIFEST), &manifest)?;
    Ok(reports)
}
