use alloc::vec;
use alloc::vec::Vec;

use super::{CubeOrigin, FsrConfig};
use crate::volume::{Dims, Mask};

/// Normalized Gaussian taps truncated at `ceil(3 sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = libm::ceil(3.0 * sigma) as isize;
    let taps: Vec<f64> = (-radius..=radius)
        .map(|d| libm::exp(-((d * d) as f64) / (2.0 * sigma * sigma)))
        .collect();
    let sum: f64 = taps.iter().sum();
    taps.into_iter().map(|t| t / sum).collect()
}

/// Cube origins in raster order `(t, y, x)`; edge cubes may be partial.
pub fn cube_origins(dims: Dims, cube_size: usize) -> Vec<CubeOrigin> {
    let mut out = Vec::new();
    for t in (0..dims.frames).step_by(cube_size) {
        for y in (0..dims.height).step_by(cube_size) {
            for x in (0..dims.width).step_by(cube_size) {
                out.push(CubeOrigin::new(x, y, t));
            }
        }
    }
    out
}

/// Convolves `data` along one axis with zero padding.
fn blur_axis(data: &[f64], dims: Dims, axis: usize, kernel: &[f64]) -> Vec<f64> {
    let radius = (kernel.len() / 2) as isize;
    let (extent, stride) = match axis {
        0 => (dims.width, 1),
        1 => (dims.height, dims.width),
        _ => (dims.frames, dims.frame_len()),
    };
    let mut out = vec![0.0; data.len()];
    for (i, o) in out.iter_mut().enumerate() {
        let pos = ((i / stride) % extent) as isize;
        let mut acc = 0.0;
        for (j, &k) in kernel.iter().enumerate() {
            let src = pos + j as isize - radius;
            if src >= 0 && src < extent as isize {
                acc += k * data[(i as isize + (src - pos) * stride as isize) as usize];
            }
        }
        *o = acc;
    }
    out
}

/// Density-based processing order.
///
/// The 0/1 mask is low-pass filtered with a separable Gaussian
/// (`order_sigma`, truncated at 3 sigma, zero padding), the filtered values
/// are summed per cube, and cubes holding missing samples are returned in
/// decreasing order of that sum. Equal sums keep raster order.
pub fn plan_order(known: &Mask, config: &FsrConfig) -> Vec<CubeOrigin> {
    let dims = known.dims();
    let kernel = gaussian_kernel(config.order_sigma);
    let mut density: Vec<f64> = known.as_slice().iter().map(|&b| f64::from(u8::from(b))).collect();
    for axis in 0..3 {
        density = blur_axis(&density, dims, axis, &kernel);
    }

    let cs = config.cube_size;
    let mut scored: Vec<(f64, CubeOrigin)> = cube_origins(dims, cs)
        .into_iter()
        .filter_map(|c| {
            let mut sum = 0.0;
            let mut missing = false;
            for t in c.t..(c.t + cs).min(dims.frames) {
                for y in c.y..(c.y + cs).min(dims.height) {
                    for x in c.x..(c.x + cs).min(dims.width) {
                        let i = dims.index(x, y, t);
                        sum += density[i];
                        missing |= !known.as_slice()[i];
                    }
                }
            }
            missing.then_some((sum, c))
        })
        .collect();
    // Stable sort: raster order survives among equal sums.
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    scored.into_iter().map(|(_, c)| c).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{build_mask, make_schedule, LabelGrid, SamplingMode};

    #[test]
    fn kernel_is_normalized_and_truncated() {
        let k = gaussian_kernel(4.0);
        assert_eq!(k.len(), 25);
        assert!((k.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(k[0], k[24]);
    }

    #[test]
    fn fully_sampled_volume_needs_nothing() {
        let m = Mask::filled(Dims::new(16, 16, 8).unwrap(), true);
        assert!(plan_order(&m, &FsrConfig::default()).is_empty());
    }

    #[test]
    fn uniform_wiring_gives_raster_order_in_interior() {
        let dims = Dims::new(96, 96, 32).unwrap();
        let grid = LabelGrid::uniform(96, 96, [3, 1, 4, 2]).unwrap();
        let sched = make_schedule(25, None).unwrap();
        let mask = build_mask(&grid, &sched, dims.frames, SamplingMode::Dynamic, 0).unwrap();
        let cfg = FsrConfig::default();
        let order = plan_order(&mask, &cfg);
        assert_eq!(order.len(), 24 * 24 * 8);
        // Cubes at least 3 sigma (12 samples) away from every edge.
        let interior: Vec<CubeOrigin> = order
            .iter()
            .copied()
            .filter(|c| {
                c.x >= 12 && c.x + 4 + 12 <= 96 && c.y >= 12 && c.y + 4 + 12 <= 96 && c.t >= 12 && c.t + 4 + 12 <= 32
            })
            .collect();
        assert!(!interior.is_empty());
        let mut raster = interior.clone();
        raster.sort_by_key(|c| (c.t, c.y, c.x));
        assert_eq!(interior, raster);
    }
}
