use alloc::vec::Vec;

use super::FsrConfig;
use crate::{Error, Result};

/// Signed frequency index: `k` for `k <= size / 2`, otherwise `k - size`.
#[inline]
pub fn centered_index(k: usize, size: usize) -> isize {
    if k <= size / 2 {
        k as isize
    } else {
        k as isize - size as isize
    }
}

/// Exponent of the frequency prior, `-ln(omega) / tau`.
pub fn alpha(omega: f64, tau: f64) -> Result<f64> {
    if !(omega > 0.0 && omega <= 1.0 + 1e-12) {
        return Err(Error::InvalidOmega(omega));
    }
    // Rounding can push a fully known area marginally above one.
    Ok((-libm::log(omega.min(1.0)) / tau).max(0.0))
}

/// Radial base `max(0, 1 - sqrt(2) * |(k~/M, l~/N, q~/P)|)` for every
/// frequency of an area; independent of the data.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorBase {
    shape: [usize; 3],
    base: Vec<f64>,
}

impl PriorBase {
    pub fn new(shape: [usize; 3]) -> Self {
        let [m, n, p] = shape;
        let mut base = Vec::with_capacity(m * n * p);
        for q in 0..p {
            let fq = centered_index(q, p) as f64 / p as f64;
            for l in 0..n {
                let fl = centered_index(l, n) as f64 / n as f64;
                for k in 0..m {
                    let fk = centered_index(k, m) as f64 / m as f64;
                    let r = libm::sqrt(fk * fk + fl * fl + fq * fq);
                    base.push((1.0 - core::f64::consts::SQRT_2 * r).max(0.0));
                }
            }
        }
        Self { shape, base }
    }

    pub fn shape(&self) -> [usize; 3] {
        self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.base
    }

    /// Raises every base to `2 * alpha`, with `0^0 = 1`.
    pub fn weights(&self, alpha: f64) -> FrequencyPrior {
        let weights = if alpha == 0.0 {
            alloc::vec![1.0; self.base.len()]
        } else {
            let e = 2.0 * alpha;
            self.base.iter().map(|&b| libm::pow(b, e)).collect()
        };
        FrequencyPrior { alpha, weights }
    }
}

/// Selection weights that favour low frequencies when few samples are usable.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyPrior {
    pub alpha: f64,
    pub weights: Vec<f64>,
}

/// Prior for effective data measure `omega` on the configured area size.
pub fn frequency_prior(omega: f64, config: &FsrConfig) -> Result<FrequencyPrior> {
    let a = alpha(omega, config.tau)?;
    Ok(PriorBase::new(config.area_shape()).weights(a))
}
