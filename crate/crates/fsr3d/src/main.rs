use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fsr3d::config_file::{load_config, FsrOverrides};
use fsr3d::core::{Dims, FsrConfig, SamplingMode};
use fsr3d::io;
use fsr3d::parallel::available_threads;
use fsr3d::pipeline::{
    cmd_evaluate, cmd_pipeline, cmd_reconstruct, cmd_sample, EvaluateSpec, InputSpec, PipelineSpec,
    ReconstructSpec, SamplingSpec,
};
use fsr3d::report::PsnrReport;
use fsr3d::{Error, Result};

/// Dynamic non-regular sampling and 3D frequency selective reconstruction
/// of gray-8 video clips.
#[derive(Parser)]
#[command(name = "fsr3d", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a clip and write the sampled clip, mask, label grid and manifest.
    Sample {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        sampling: SamplingArgs,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Reconstruct the missing samples of a sampled clip.
    Reconstruct {
        #[arg(long)]
        sampled: PathBuf,
        #[arg(long)]
        mask: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        fsr: FsrArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Border-excluded whole-sequence PSNR of a test clip against a reference.
    Evaluate {
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[command(flatten)]
        dims: DimsArgs,
        #[command(flatten)]
        borders: BorderArgs,
        /// Append the result row to this CSV.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        sequence: Option<String>,
        #[arg(long, value_parser = parse_density)]
        density: Option<u32>,
        #[arg(long)]
        mode: Option<SamplingMode>,
        /// Method label for the config column.
        #[arg(long, default_value = "")]
        label: String,
    },
    /// Sample, reconstruct and evaluate in one go.
    Pipeline {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        sequence: Option<String>,
        #[arg(long, value_parser = parse_density)]
        density: u32,
        /// Comma separated sampling modes.
        #[arg(long, value_delimiter = ',', default_value = "static,dynamic")]
        mode: Vec<SamplingMode>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        schedule_seed: Option<u64>,
        #[arg(long)]
        row_offsets: bool,
        #[arg(long)]
        out: PathBuf,
        /// Also score the Gaussian fill baseline.
        #[arg(long)]
        baseline: bool,
        #[command(flatten)]
        borders: BorderArgs,
        /// Write 0 as runtime so repeated runs give identical reports.
        #[arg(long)]
        no_timing: bool,
        /// Print the resolved settings and exit without touching any file.
        #[arg(long)]
        dry_run: bool,
        #[command(flatten)]
        fsr: FsrArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Extract the luma planes of a planar YUV 4:2:0 file.
    ImportYuv {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        width: usize,
        #[arg(long)]
        height: usize,
        #[arg(long)]
        output: PathBuf,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Raw gray-8 clip.
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    dims: DimsArgs,
}

/// Overrides the sidecar when all three are given.
#[derive(Args)]
struct DimsArgs {
    #[arg(long, requires_all = ["height", "frames"])]
    width: Option<usize>,
    #[arg(long, requires_all = ["width", "frames"])]
    height: Option<usize>,
    #[arg(long, requires_all = ["width", "height"])]
    frames: Option<usize>,
}

impl DimsArgs {
    fn dims(&self) -> Result<Option<Dims>> {
        match (self.width, self.height, self.frames) {
            (Some(w), Some(h), Some(f)) => Ok(Some(Dims::new(w, h, f)?)),
            _ => Ok(None),
        }
    }
}

#[derive(Args)]
struct SamplingArgs {
    #[arg(long, value_parser = parse_density)]
    density: u32,
    #[arg(long)]
    mode: SamplingMode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    schedule_seed: Option<u64>,
    #[arg(long)]
    row_offsets: bool,
}

#[derive(Args)]
struct BorderArgs {
    #[arg(long, default_value_t = 14)]
    spatial_border: usize,
    #[arg(long, default_value_t = 14)]
    temporal_border: usize,
}

#[derive(Args)]
struct FsrArgs {
    /// key = value file with reconstruction parameters.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    cube_size: Option<usize>,
    #[arg(long)]
    border_width: Option<usize>,
    #[arg(long)]
    fft_size: Option<usize>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    rho_hat: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    order_sigma: Option<f64>,
}

impl FsrArgs {
    fn resolve(&self) -> Result<FsrConfig> {
        let cli = FsrOverrides {
            cube_size: self.cube_size,
            border_width: self.border_width,
            fft_size: self.fft_size,
            iterations: self.iterations,
            rho_hat: self.rho_hat,
            gamma: self.gamma,
            delta: self.delta,
            tau: self.tau,
            order_sigma: self.order_sigma,
        };
        let file = match &self.config {
            Some(path) => load_config(path)?,
            None => FsrOverrides::default(),
        };
        cli.over(file)
            .resolve()
            .map_err(|e| Error::Usage(format!("invalid reconstruction config: {e}")))
    }
}

#[derive(Args)]
struct RunArgs {
    /// Worker threads; 1 is the sequential reference, 0 uses every core.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// No progress output on stderr.
    #[arg(long)]
    quiet: bool,
}

impl RunArgs {
    fn threads(&self) -> usize {
        if self.threads == 0 {
            available_threads()
        } else {
            self.threads
        }
    }
}

fn parse_density(s: &str) -> std::result::Result<u32, String> {
    match s.trim_end_matches('%').parse() {
        Ok(d @ (25 | 50 | 75)) => Ok(d),
        _ => Err(format!("density must be 25, 50 or 75, got {s}")),
    }
}

fn print_report(r: &PsnrReport) {
    let psnr = if r.psnr_db.is_infinite() {
        "INF".to_string()
    } else {
        format!("{:.4}", r.psnr_db)
    };
    let mode = r.mode.map(|m| m.as_str()).unwrap_or("-");
    println!(
        "{}\t{}\t{}\tpsnr_db={}\tmse={}\t{}",
        r.sequence,
        r.density.map(|d| d.to_string()).unwrap_or_else(|| "-".into()),
        mode,
        psnr,
        r.mse,
        r.config
    );
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sample { input, sampling, out } => {
            let input = InputSpec {
                path: input.input,
                dims: input.dims.dims()?,
            };
            let spec = SamplingSpec {
                density: sampling.density,
                mode: sampling.mode,
                seed: sampling.seed,
                schedule_seed: sampling.schedule_seed,
                row_offsets: sampling.row_offsets,
            };
            let s = cmd_sample(&input, &spec, &out)?;
            println!(
                "sampled {} at {}% {} (period {}) into {}",
                s.volume.dims(),
                spec.density,
                spec.mode,
                s.schedule.period(),
                out.display()
            );
        }
        Command::Reconstruct {
            sampled,
            mask,
            output,
            fsr,
            run,
        } => {
            let spec = ReconstructSpec {
                sampled,
                mask,
                output,
                config: fsr.resolve()?,
                threads: run.threads(),
                progress: !run.quiet,
            };
            cmd_reconstruct(&spec)?;
            println!("{}", spec.output.display());
        }
        Command::Evaluate {
            reference,
            test,
            dims,
            borders,
            report,
            sequence,
            density,
            mode,
            label,
        } => {
            let dims = dims.dims()?;
            let sequence = sequence.unwrap_or_else(|| {
                test.file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default()
            });
            let spec = EvaluateSpec {
                reference: InputSpec { path: reference, dims },
                test: InputSpec { path: test, dims },
                spatial_border: borders.spatial_border,
                temporal_border: borders.temporal_border,
                sequence,
                density,
                mode,
                config: label,
                report,
            };
            print_report(&cmd_evaluate(&spec)?);
        }
        Command::Pipeline {
            input,
            sequence,
            density,
            mode,
            seed,
            schedule_seed,
            row_offsets,
            out,
            baseline,
            borders,
            no_timing,
            dry_run,
            fsr,
            run,
        } => {
            let spec = PipelineSpec {
                input: InputSpec {
                    path: input.input,
                    dims: input.dims.dims()?,
                },
                sequence,
                density,
                modes: mode,
                seed,
                schedule_seed,
                row_offsets,
                config: fsr.resolve()?,
                threads: run.threads(),
                out_dir: out,
                baseline,
                spatial_border: borders.spatial_border,
                temporal_border: borders.temporal_border,
                timing: !no_timing,
                progress: !run.quiet,
            };
            if dry_run {
                spec.validate()?;
                println!(
                    "{}",
                    serde_json::to_string_pretty(&spec.describe()).expect("json")
                );
                return Ok(());
            }
            for r in cmd_pipeline(&spec)? {
                print_report(&r);
            }
        }
        Command::ImportYuv {
            input,
            width,
            height,
            output,
        } => {
            let loaded = io::import_yuv420(&input, width, height)?;
            if let Some(w) = loaded.warning(&input) {
                eprintln!("{w}");
            }
            io::save_volume(&output, &loaded.value)?;
            println!("{} frames into {}", loaded.value.dims().frames, output.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
