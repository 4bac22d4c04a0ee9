//! Reconstruction quality and a simple fill baseline.

use alloc::vec::Vec;

use crate::volume::{cropped_dims, Mask, Volume};
use crate::Result;

/// Whole-sequence error over the border-excluded interior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsnrMeasure {
    pub mse: f64,
    /// Number of samples pooled into `mse`.
    pub samples: usize,
}

impl PsnrMeasure {
    /// `10 log10(255^2 / mse)`; positive infinity for identical inputs.
    pub fn psnr_db(&self) -> f64 {
        if self.mse == 0.0 {
            f64::INFINITY
        } else {
            10.0 * libm::log10(255.0 * 255.0 / self.mse)
        }
    }
}

/// Pools the squared error of all frames inside the interior left after
/// removing `spatial_border` pixels and `temporal_border` frames on each side,
/// then converts to PSNR with peak 255. Inputs are used at full precision.
pub fn psnr_volume(
    reference: &Volume,
    test: &Volume,
    spatial_border: usize,
    temporal_border: usize,
) -> Result<PsnrMeasure> {
    let dims = reference.dims();
    dims.ensure_same(&test.dims())?;
    let inner = cropped_dims(dims, spatial_border, temporal_border)?;
    let (a, b) = (reference.as_slice(), test.as_slice());
    let mut sum = 0.0;
    for t in temporal_border..temporal_border + inner.frames {
        for y in spatial_border..spatial_border + inner.height {
            let start = dims.index(spatial_border, y, t);
            for i in start..start + inner.width {
                let d = a[i] - b[i];
                sum += d * d;
            }
        }
    }
    let samples = inner.len();
    Ok(PsnrMeasure {
        mse: sum / samples as f64,
        samples,
    })
}

const BASELINE_RADIUS: isize = 2;
const BASELINE_SIGMA: f64 = 1.5;

/// Normalized Gaussian interpolation of missing samples.
///
/// Each missing sample becomes the Gaussian-weighted (sigma 1.5) mean of the
/// known samples in its 5x5x5 neighbourhood, or the nearest known sample when
/// that neighbourhood is empty. Known samples are copied unchanged. Without
/// any known sample the input is returned as is.
pub fn baseline_fill(sampled: &Volume, mask: &Mask) -> Result<Volume> {
    let dims = sampled.dims();
    dims.ensure_same(&mask.dims())?;
    let known = mask.as_slice();
    let values = sampled.as_slice();
    let mut out = sampled.clone();
    if !known.iter().any(|&k| k) {
        return Ok(out);
    }

    let taps: Vec<f64> = (-BASELINE_RADIUS..=BASELINE_RADIUS)
        .map(|d| libm::exp(-((d * d) as f64) / (2.0 * BASELINE_SIGMA * BASELINE_SIGMA)))
        .collect();
    let tap = |d: isize| taps[(d + BASELINE_RADIUS) as usize];

    for t in 0..dims.frames {
        for y in 0..dims.height {
            for x in 0..dims.width {
                let i = dims.index(x, y, t);
                if known[i] {
                    continue;
                }
                let (mut num, mut den) = (0.0, 0.0);
                for dt in -BASELINE_RADIUS..=BASELINE_RADIUS {
                    for dy in -BASELINE_RADIUS..=BASELINE_RADIUS {
                        for dx in -BASELINE_RADIUS..=BASELINE_RADIUS {
                            let Some(j) = dims.checked_index(x as isize + dx, y as isize + dy, t as isize + dt) else {
                                continue;
                            };
                            if known[j] {
                                let w = tap(dx) * tap(dy) * tap(dt);
                                num += w * values[j];
                                den += w;
                            }
                        }
                    }
                }
                out.as_mut_slice()[i] = if den > 0.0 {
                    num / den
                } else {
                    values[nearest_known(mask, x, y, t)]
                };
            }
        }
    }
    Ok(out)
}

/// Index of the Euclidean-nearest known sample; ties resolve in raster order.
fn nearest_known(mask: &Mask, x: usize, y: usize, t: usize) -> usize {
    let dims = mask.dims();
    let known = mask.as_slice();
    let (x, y, t) = (x as isize, y as isize, t as isize);
    let max_extent = dims.width.max(dims.height).max(dims.frames) as isize;
    let search = |radius: isize| {
        let mut best: Option<(isize, usize)> = None;
        for dt in -radius..=radius {
            for dy in -radius..=radius {
                for dx in -radius..=radius {
                    if let Some(j) = dims.checked_index(x + dx, y + dy, t + dt) {
                        let d2 = dx * dx + dy * dy + dt * dt;
                        if known[j] && best.is_none_or(|(bd, bj)| d2 < bd || (d2 == bd && j < bj)) {
                            best = Some((d2, j));
                        }
                    }
                }
            }
        }
        best
    };
    let mut radius = BASELINE_RADIUS + 1;
    loop {
        if let Some((d2, _)) = search(radius) {
            // Anything closer than sqrt(d2) lies within this Chebyshev radius.
            let reach = libm::ceil(libm::sqrt(d2 as f64)) as isize;
            return search(reach.max(radius)).map(|(_, j)| j).unwrap_or(0);
        }
        if radius > max_extent {
            return 0;
        }
        radius *= 2;
    }
}
