//! Regenerates the files under `tests/fixtures`.
//!
//! Run with `cargo run --release -p fsr3d --example make_fixtures`. The
//! expected PSNR is measured on the 8-bit reconstruction, exactly as the
//! command line `reconstruct` + `evaluate` pair computes it.

use std::fs;
use std::path::Path;

use fsr3d::core::{psnr_volume, FsrConfig, SamplingMode};
use fsr3d::io::{save_mask, save_volume};
use fsr3d::pipeline::{sample_volume, SamplingSpec};
use fsr3d::synthetic::moving_gradient;
use serde_json::json;

fn main() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let masks = root.join("masks");
    fs::create_dir_all(&masks).unwrap();

    let clip = moving_gradient(16, 16, 8).quantized();
    for mode in [SamplingMode::Static, SamplingMode::Dynamic, SamplingMode::Random3d] {
        for density in [25, 50, 75] {
            let spec = SamplingSpec {
                density,
                mode,
                seed: 1,
                schedule_seed: Some(2),
                row_offsets: mode == SamplingMode::Dynamic,
            };
            let s = sample_volume(&clip, &spec).unwrap();
            save_mask(&masks.join(format!("{mode}_{density}.gray8")), &s.mask).unwrap();
        }
    }

    let clip = moving_gradient(32, 32, 8).quantized();
    let spec = SamplingSpec {
        density: 25,
        mode: SamplingMode::Dynamic,
        seed: 1,
        schedule_seed: None,
        row_offsets: false,
    };
    let s = sample_volume(&clip, &spec).unwrap();
    save_volume(&root.join("regression_clip.gray8"), &clip).unwrap();
    save_volume(&root.join("regression_sampled.gray8"), &s.volume).unwrap();
    save_mask(&root.join("regression_mask.gray8"), &s.mask).unwrap();
    let rec = fsr3d::core::reconstruct(&s.volume, &s.mask, &FsrConfig::default()).unwrap();
    let psnr = psnr_volume(&clip, &rec.quantized(), 4, 2).unwrap().psnr_db();
    let expected = json!({
        "spatial_border": 4,
        "temporal_border": 2,
        "psnr_db": psnr,
    });
    fs::write(
        root.join("regression_expected.json"),
        serde_json::to_string_pretty(&expected).unwrap() + "\n",
    )
    .unwrap();
    println!("regression PSNR {psnr:.4} dB");

    let clip = moving_gradient(64, 64, 16);
    let mut modes = serde_json::Map::new();
    for mode in [SamplingMode::Static, SamplingMode::Dynamic] {
        let s = sample_volume(
            &clip,
            &SamplingSpec {
                mode,
                ..spec
            },
        )
        .unwrap();
        let rec = fsr3d::core::reconstruct(&s.volume, &s.mask, &FsrConfig::default()).unwrap();
        let psnr = psnr_volume(&clip, &rec, 4, 2).unwrap().psnr_db();
        println!("moving gradient {mode}: {psnr:.4} dB");
        modes.insert(mode.as_str().to_string(), json!(psnr));
    }
    fs::write(
        root.join("moving_gradient_expected.json"),
        serde_json::to_string_pretty(&serde_json::Value::Object(modes)).unwrap() + "\n",
    )
    .unwrap();
}
