//! Deterministic synthetic clips used as test fixtures.

use std::f64::consts::TAU;

use fsr3d_core::rng::SeededRng;
use fsr3d_core::{Dims, Volume};

/// Sum of oriented sinusoids evaluated at continuous positions.
#[derive(Debug, Clone)]
pub struct Texture {
    waves: Vec<Wave>,
}

#[derive(Debug, Clone, Copy)]
struct Wave {
    fx: f64,
    fy: f64,
    phase: f64,
    amplitude: f64,
}

impl Texture {
    /// `count` waves with periods between `min_period` and `max_period`
    /// pixels, random orientations and phases, amplitudes summing to
    /// `amplitude`.
    pub fn random(seed: u64, count: usize, min_period: f64, max_period: f64, amplitude: f64) -> Self {
        let mut rng = SeededRng::new(seed);
        let waves = (0..count)
            .map(|_| {
                let period = min_period + (max_period - min_period) * rng.unit_f64();
                let angle = TAU * rng.unit_f64();
                Wave {
                    fx: angle.cos() / period,
                    fy: angle.sin() / period,
                    phase: TAU * rng.unit_f64(),
                    amplitude: amplitude / count as f64,
                }
            })
            .collect();
        Self { waves }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.waves
            .iter()
            .map(|w| w.amplitude * (TAU * (w.fx * x + w.fy * y) + w.phase).sin())
            .sum()
    }
}

fn clip(v: f64) -> f64 {
    v.clamp(0.0, 255.0)
}

/// Horizontal ramp with a soft stripe pattern sliding right one pixel per frame.
pub fn moving_gradient(width: usize, height: usize, frames: usize) -> Volume {
    let dims = Dims::new(width, height, frames).expect("non-empty fixture");
    Volume::from_fn(dims, |x, y, t| {
        let (x, y, t) = (x as f64, y as f64, t as f64);
        let ramp = 40.0 + 150.0 * (x + 0.5 * y) / (width as f64 + 0.5 * height as f64);
        let stripes = 30.0 * (TAU * (x - t) / 16.0).sin() * (TAU * y / 24.0).cos();
        clip(ramp + stripes)
    })
}

/// Still textured background with one small textured block moving diagonally.
pub fn static_scene(width: usize, height: usize, frames: usize, seed: u64) -> Volume {
    let dims = Dims::new(width, height, frames).expect("non-empty fixture");
    let background = Texture::random(seed, 6, 2.5, 6.0, 150.0);
    let block = Texture::random(seed ^ 0x5eed, 2, 6.0, 12.0, 80.0);
    let size = 8;
    Volume::from_fn(dims, |x, y, t| {
        let bx = width / 4 + t;
        let by = height / 4 + t / 2;
        if (bx..bx + size).contains(&x) && (by..by + size).contains(&y) {
            clip(90.0 + block.eval((x - bx) as f64, (y - by) as f64))
        } else {
            clip(128.0 + background.eval(x as f64, y as f64))
        }
    })
}

/// The whole texture translating by `(vx, vy)` pixels per frame.
pub fn global_motion(width: usize, height: usize, frames: usize, seed: u64, vx: f64, vy: f64) -> Volume {
    let dims = Dims::new(width, height, frames).expect("non-empty fixture");
    let texture = Texture::random(seed, 6, 4.0, 12.0, 150.0);
    Volume::from_fn(dims, |x, y, t| {
        let t = t as f64;
        clip(128.0 + texture.eval(x as f64 - vx * t, y as f64 - vy * t))
    })
}

/// Natural-looking mixture of smooth shading and medium-frequency texture
/// with mild motion, for parameter sweeps.
pub fn training_clip(width: usize, height: usize, frames: usize, seed: u64) -> Volume {
    let dims = Dims::new(width, height, frames).expect("non-empty fixture");
    let shading = Texture::random(seed, 3, 40.0, 90.0, 80.0);
    let detail = Texture::random(seed.wrapping_add(1), 8, 3.0, 10.0, 100.0);
    Volume::from_fn(dims, |x, y, t| {
        let (x, y, t) = (x as f64, y as f64, t as f64);
        clip(128.0 + shading.eval(x + 0.5 * t, y) + detail.eval(x - 0.5 * t, y + 0.25 * t))
    })
}

/// Uniform gray clip.
pub fn constant(width: usize, height: usize, frames: usize, value: f64) -> Volume {
    Volume::filled(Dims::new(width, height, frames).expect("non-empty fixture"), value)
}
