use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::FsrConfig;
use crate::volume::{Mask, Volume};
use crate::{Error, Result};

/// Volume coordinate of a cube's first sample; always a multiple of the cube size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CubeOrigin {
    pub x: usize,
    pub y: usize,
    pub t: usize,
}

impl CubeOrigin {
    pub fn new(x: usize, y: usize, t: usize) -> Self {
        Self { x, y, t }
    }
}

impl fmt::Display for CubeOrigin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(x={}, y={}, t={})", self.x, self.y, self.t)
    }
}

/// Role of a sample inside a reconstruction area.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    /// Originally acquired (support area).
    Support,
    /// Missing, to be estimated (loss area). Positions outside the volume too.
    Loss,
    /// Filled in while processing an earlier cube.
    Reconstructed,
}

/// Window of `fft_size` samples per axis centred on one cube.
///
/// Buffers are indexed `(p * N + n) * M + m` with `m` along x, `n` along y
/// and `p` along t.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionArea {
    pub(crate) shape: [usize; 3],
    pub(crate) cube: CubeOrigin,
    pub(crate) origin: [isize; 3],
    pub(crate) signal: Vec<f64>,
    pub(crate) category: Vec<Category>,
    pub(crate) weight: Vec<f64>,
    pub(crate) decay_sum: f64,
}

impl ReconstructionArea {
    /// Assembles an area from raw parts. `weight` is derived from the
    /// categories and the decay function of `config`.
    pub fn from_parts(
        config: &FsrConfig,
        signal: Vec<f64>,
        category: Vec<Category>,
    ) -> Result<Self> {
        config.validate()?;
        let shape = config.area_shape();
        let len = shape.iter().product::<usize>();
        if signal.len() != len || category.len() != len {
            return Err(Error::LengthMismatch {
                expected: len,
                actual: signal.len().min(category.len()),
            });
        }
        let decay = DecayTable::new(config);
        let weight = category
            .iter()
            .zip(&decay.values)
            .map(|(&c, &rho)| weight_for(c, rho, config.delta))
            .collect();
        Ok(Self {
            shape,
            cube: CubeOrigin::new(0, 0, 0),
            origin: [0; 3],
            signal,
            category,
            weight,
            decay_sum: decay.sum,
        })
    }

    pub fn shape(&self) -> [usize; 3] {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.signal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signal.is_empty()
    }

    pub fn cube(&self) -> CubeOrigin {
        self.cube
    }

    /// Volume coordinate `(x, y, t)` of area sample `(0, 0, 0)`.
    pub fn origin(&self) -> [isize; 3] {
        self.origin
    }

    /// Observed samples; zero on the loss area.
    pub fn signal(&self) -> &[f64] {
        &self.signal
    }

    pub fn category(&self) -> &[Category] {
        &self.category
    }

    pub fn weight(&self) -> &[f64] {
        &self.weight
    }

    /// Sum of the decay function over the whole area.
    pub fn decay_sum(&self) -> f64 {
        self.decay_sum
    }

    #[inline]
    pub fn index(&self, m: usize, n: usize, p: usize) -> usize {
        (p * self.shape[1] + n) * self.shape[0] + m
    }

    /// Weighted fraction of usable samples, see [`effective_data`].
    pub fn effective_data(&self) -> f64 {
        let usable: f64 = self
            .category
            .iter()
            .zip(&self.weight)
            .filter(|(&c, _)| c != Category::Loss)
            .map(|(_, &w)| w)
            .sum();
        usable / self.decay_sum
    }
}

#[inline]
fn weight_for(category: Category, rho: f64, delta: f64) -> f64 {
    match category {
        Category::Support => rho,
        Category::Reconstructed => delta * rho,
        Category::Loss => 0.0,
    }
}

/// Isotropic exponential decay around the (possibly fractional) area centre:
/// `rho_hat ^ |(m, n, p) - ((M-1)/2, (N-1)/2, (P-1)/2)|`.
pub fn decay_weight(m: usize, n: usize, p: usize, config: &FsrConfig) -> f64 {
    let c = (config.fft_size as f64 - 1.0) / 2.0;
    let (dm, dn, dp) = (m as f64 - c, n as f64 - c, p as f64 - c);
    libm::pow(config.rho_hat, libm::sqrt(dm * dm + dn * dn + dp * dp))
}

#[derive(Debug, Clone)]
struct DecayTable {
    values: Vec<f64>,
    sum: f64,
}

impl DecayTable {
    fn new(config: &FsrConfig) -> Self {
        let s = config.fft_size;
        let mut values = Vec::with_capacity(s * s * s);
        for p in 0..s {
            for n in 0..s {
                for m in 0..s {
                    values.push(decay_weight(m, n, p, config));
                }
            }
        }
        let sum = values.iter().sum();
        Self { values, sum }
    }
}

/// Builds reconstruction areas for one configuration, caching the decay table.
#[derive(Debug, Clone)]
pub struct AreaBuilder {
    config: FsrConfig,
    decay: DecayTable,
}

impl AreaBuilder {
    pub fn new(config: &FsrConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config: *config,
            decay: DecayTable::new(config),
        })
    }

    pub fn config(&self) -> &FsrConfig {
        &self.config
    }

    /// Window around `cube`. Samples with `known` set are support, those with
    /// `reconstructed` set are reconstructed, everything else (including
    /// positions outside the volume) is loss.
    pub fn build(
        &self,
        sampled: &Volume,
        known: &Mask,
        reconstructed: &Mask,
        cube: CubeOrigin,
    ) -> Result<ReconstructionArea> {
        let dims = sampled.dims();
        dims.ensure_same(&known.dims())?;
        dims.ensure_same(&reconstructed.dims())?;
        let cs = self.config.cube_size;
        if !cube.x.is_multiple_of(cs) || !cube.y.is_multiple_of(cs) || !cube.t.is_multiple_of(cs) {
            return Err(Error::InvalidConfig("cube origin is not aligned to the cube grid"));
        }
        if cube.x >= dims.width || cube.y >= dims.height || cube.t >= dims.frames {
            return Err(Error::InvalidConfig("cube origin lies outside the volume"));
        }

        let size = self.config.fft_size;
        let b = self.config.border_width as isize;
        let origin = [cube.x as isize - b, cube.y as isize - b, cube.t as isize - b];
        let len = size * size * size;
        let mut signal = vec![0.0; len];
        let mut category = vec![Category::Loss; len];
        let mut weight = vec![0.0; len];

        let values = sampled.as_slice();
        let known = known.as_slice();
        let recon = reconstructed.as_slice();
        for p in 0..size {
            let t = origin[2] + p as isize;
            if t < 0 || t >= dims.frames as isize {
                continue;
            }
            for n in 0..size {
                let y = origin[1] + n as isize;
                if y < 0 || y >= dims.height as isize {
                    continue;
                }
                let row = (p * size + n) * size;
                let m0 = (-origin[0]).max(0) as usize;
                let m1 = (dims.width as isize - origin[0]).min(size as isize) as usize;
                let vol_row = dims.index(0, y as usize, t as usize);
                for m in m0..m1 {
                    let vi = vol_row + (origin[0] + m as isize) as usize;
                    let ai = row + m;
                    let c = if known[vi] {
                        Category::Support
                    } else if recon[vi] {
                        Category::Reconstructed
                    } else {
                        continue;
                    };
                    category[ai] = c;
                    signal[ai] = values[vi];
                    weight[ai] = weight_for(c, self.decay.values[ai], self.config.delta);
                }
            }
        }

        Ok(ReconstructionArea {
            shape: [size; 3],
            cube,
            origin,
            signal,
            category,
            weight,
            decay_sum: self.decay.sum,
        })
    }
}

/// One-off area construction; see [`AreaBuilder::build`].
pub fn build_area(
    sampled: &Volume,
    known: &Mask,
    reconstructed: &Mask,
    cube: CubeOrigin,
    config: &FsrConfig,
) -> Result<ReconstructionArea> {
    AreaBuilder::new(config)?.build(sampled, known, reconstructed, cube)
}

/// Effective data measure: weight of support and reconstructed samples over
/// the total decay mass of the area. Lies in `[0, 1]`.
pub fn effective_data(area: &ReconstructionArea) -> f64 {
    area.effective_data()
}
