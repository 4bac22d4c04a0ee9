use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::area::ReconstructionArea;
use super::prior::{alpha, centered_index, PriorBase};
use super::FsrConfig;
use crate::fft::Fft3;
use crate::{Error, Result};

/// Relative band below the maximum selection energy inside which candidates
/// count as tied. Ties go to the lowest `(|q~|, |l~|, |k~|, q, l, k)`.
pub const TIE_TOLERANCE: f64 = 1e-10;

/// Basis function chosen in one iteration and the coefficient added to the model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection {
    /// Frequency index `(k, l, q)` of the selected basis function.
    pub index: [usize; 3],
    /// Expansion coefficient, already scaled by `gamma`.
    pub coefficient: Complex64,
}

/// State after one iteration, handed to a [`ModelObserver`].
#[derive(Debug)]
pub struct IterationStep<'a> {
    /// 1-based iteration number.
    pub iteration: usize,
    pub selection: Selection,
    /// `sum w |r|^2` over the area after the update: the quantity each
    /// projection minimizes. Only computed when the observer asks for it.
    pub weighted_energy: Option<f64>,
    /// `sum |r * w|^2` over the area after the update, via Parseval.
    pub weighted_residual_norm: f64,
    /// Real and imaginary parts of the weighted residual spectrum after the
    /// update; empty when produced by the spatial oracle.
    pub residual_spectrum: (&'a [f64], &'a [f64]),
    /// Model spectrum after the update; empty when produced by the oracle.
    pub model_spectrum: &'a [Complex64],
}

pub trait ModelObserver {
    fn iteration(&mut self, step: &IterationStep<'_>);

    /// Whether [`IterationStep::weighted_energy`] should be filled in. Costs
    /// one extra pass over the spectra per iteration.
    fn wants_weighted_energy(&self) -> bool {
        false
    }
}

/// Observer that ignores every step.
pub struct NoObserver;

impl ModelObserver for NoObserver {
    fn iteration(&mut self, _: &IterationStep<'_>) {}
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelOutput {
    /// Real part of the model over the area, same layout as the area buffers.
    pub model: Vec<f64>,
    pub selections: Vec<Selection>,
    /// Effective data measure of the area.
    pub omega: f64,
    /// Prior exponent derived from `omega`.
    pub alpha: f64,
    /// `sum w s^2` before the first iteration.
    pub initial_weighted_energy: f64,
    /// `sum |s * w|^2` before the first iteration.
    pub initial_residual_norm: f64,
}

/// Frequency-domain model generation with per-configuration tables cached.
#[derive(Debug, Clone)]
pub struct ModelEngine {
    config: FsrConfig,
    fft: Fft3,
    prior: PriorBase,
    rank: Vec<u32>,
}

/// Sum over four independent lanes.
#[derive(Clone, Copy)]
struct Lanes([f64; 4]);

impl Lanes {
    fn sum(&self) -> f64 {
        (self.0[0] + self.0[1]) + (self.0[2] + self.0[3])
    }
}

fn lane_max(v: [f64; 4]) -> f64 {
    v.iter().fold(0.0, |a, &b| if b > a { b } else { a })
}

impl ModelEngine {
    pub fn new(config: &FsrConfig) -> Result<Self> {
        config.validate()?;
        let shape = config.area_shape();
        Ok(Self {
            config: *config,
            fft: Fft3::new(shape),
            prior: PriorBase::new(shape),
            rank: selection_rank(shape),
        })
    }

    pub fn config(&self) -> &FsrConfig {
        &self.config
    }

    pub fn generate(&self, area: &ReconstructionArea) -> Result<ModelOutput> {
        self.generate_observed(area, &mut NoObserver)
    }

    pub fn generate_observed(
        &self,
        area: &ReconstructionArea,
        observer: &mut dyn ModelObserver,
    ) -> Result<ModelOutput> {
        let shape = self.fft.shape();
        if area.shape() != shape {
            return Err(Error::InvalidConfig("area shape does not match the engine"));
        }
        let omega = area.effective_data();
        if omega.is_nan() || omega <= 0.0 {
            return Err(Error::DegenerateCube(area.cube()));
        }
        let alpha = alpha(omega, self.config.tau)?;
        let wf = self.prior.weights(alpha).weights;
        let want_energy = observer.wants_weighted_energy();

        let len = self.fft.len();
        let [m, n, p] = shape;
        let mut w_spec: Vec<Complex64> = area.weight().iter().map(|&w| Complex64::new(w, 0.0)).collect();
        self.fft.forward(&mut w_spec);
        let w0 = w_spec[0].re;
        if w0.is_nan() || w0 <= 0.0 {
            return Err(Error::DegenerateCube(area.cube()));
        }
        // Each row of W stored twice so that every circular shift of a row is
        // one contiguous slice.
        let mut w_re = Vec::with_capacity(2 * len);
        let mut w_im = Vec::with_capacity(2 * len);
        for row in w_spec.chunks_exact(m) {
            for _ in 0..2 {
                w_re.extend(row.iter().map(|c| c.re));
                w_im.extend(row.iter().map(|c| c.im));
            }
        }

        let mut rw: Vec<Complex64> = area
            .signal()
            .iter()
            .zip(area.weight())
            .map(|(&s, &w)| Complex64::new(s * w, 0.0))
            .collect();
        self.fft.forward(&mut rw);
        let mut r_re: Vec<f64> = rw.iter().map(|c| c.re).collect();
        let mut r_im: Vec<f64> = rw.iter().map(|c| c.im).collect();
        drop(rw);

        // Spectrum of the unweighted signal, only needed for `sum w |r|^2`.
        let s_spec = if want_energy {
            let mut s: Vec<Complex64> = area.signal().iter().map(|&v| Complex64::new(v, 0.0)).collect();
            self.fft.forward(&mut s);
            s
        } else {
            Vec::new()
        };

        let mut energies = vec![0.0; len];
        let mut row_max = vec![0.0; len / m];
        let mut total = 0.0;
        for (row, rmax) in row_max.iter_mut().enumerate() {
            for i in row * m..(row + 1) * m {
                let a = r_re[i] * r_re[i] + r_im[i] * r_im[i];
                total += a;
                energies[i] = a * wf[i];
                if energies[i] > *rmax {
                    *rmax = energies[i];
                }
            }
        }
        let scale = len as f64;
        let initial_residual_norm = total / scale;
        let initial_weighted_energy = area
            .signal()
            .iter()
            .zip(area.weight())
            .map(|(&s, &w)| w * s * s)
            .sum();

        let mut g_spec = vec![Complex64::new(0.0, 0.0); len];
        let mut selections = Vec::with_capacity(self.config.iterations);
        for iteration in 1..=self.config.iterations {
            let best = pick(&energies, &row_max, m, &self.rank);
            let (u, v, z) = (best % m, (best / m) % n, best / (m * n));
            let c = Complex64::new(r_re[best], r_im[best]) * (self.config.gamma / w0);
            g_spec[best] += c * scale;

            let mut lanes = Lanes([0.0; 4]);
            for q in 0..p {
                let qs = (q + p - z) % p;
                for l in 0..n {
                    let ls = (l + n - v) % n;
                    let row = (q * n + l) * m;
                    // W[(k - u) mod M] for k = 0.. starts at offset M - u of the doubled row.
                    let wrow = 2 * (qs * n + ls) * m + (m - u);
                    row_max[row / m] = update_row(
                        &mut r_re[row..row + m],
                        &mut r_im[row..row + m],
                        &w_re[wrow..wrow + m],
                        &w_im[wrow..wrow + m],
                        &wf[row..row + m],
                        &mut energies[row..row + m],
                        c,
                        &mut lanes,
                    );
                }
            }

            let weighted_energy = want_energy.then(|| {
                let mut acc = 0.0;
                for i in 0..len {
                    let r = s_spec[i] - g_spec[i];
                    acc += r.re * r_re[i] + r.im * r_im[i];
                }
                acc / scale
            });
            let selection = Selection {
                index: [u, v, z],
                coefficient: c,
            };
            selections.push(selection);
            observer.iteration(&IterationStep {
                iteration,
                selection,
                weighted_energy,
                weighted_residual_norm: lanes.sum() / scale,
                residual_spectrum: (&r_re, &r_im),
                model_spectrum: &g_spec,
            });
        }

        self.fft.inverse(&mut g_spec);
        Ok(ModelOutput {
            model: g_spec.iter().map(|g| g.re).collect(),
            selections,
            omega,
            alpha,
            initial_weighted_energy,
            initial_residual_norm,
        })
    }

    /// Tie-break rank of every frequency index.
    pub fn selection_rank(&self) -> &[u32] {
        &self.rank
    }
}

/// `R_w[k] -= c * W[k - u]` along one row, refreshing the selection energies.
/// Returns the row's largest selection energy.
#[allow(clippy::too_many_arguments)]
#[inline]
fn update_row(
    r_re: &mut [f64],
    r_im: &mut [f64],
    w_re: &[f64],
    w_im: &[f64],
    wf: &[f64],
    energies: &mut [f64],
    c: Complex64,
    lanes: &mut Lanes,
) -> f64 {
    let (cr, ci) = (c.re, c.im);
    let n = r_re.len();
    let (r_re, r_im, w_re, w_im, wf, energies) = (
        &mut r_re[..n],
        &mut r_im[..n],
        &w_re[..n],
        &w_im[..n],
        &wf[..n],
        &mut energies[..n],
    );
    let mut max = [0.0f64; 4];
    let mut step = |i: usize, lane: usize, max: &mut [f64; 4]| {
        let re = r_re[i] - (cr * w_re[i] - ci * w_im[i]);
        let im = r_im[i] - (cr * w_im[i] + ci * w_re[i]);
        r_re[i] = re;
        r_im[i] = im;
        let a = re * re + im * im;
        lanes.0[lane] += a;
        let e = a * wf[i];
        energies[i] = e;
        max[lane] = if e > max[lane] { e } else { max[lane] };
    };
    let body = n - n % 4;
    for start in (0..body).step_by(4) {
        step(start, 0, &mut max);
        step(start + 1, 1, &mut max);
        step(start + 2, 2, &mut max);
        step(start + 3, 3, &mut max);
    }
    for i in body..n {
        step(i, i - body, &mut max);
    }
    lane_max(max)
}

/// Rank of every linear frequency index under the tie-break order
/// `(|q~|, |l~|, |k~|, q, l, k)`.
pub(crate) fn selection_rank(shape: [usize; 3]) -> Vec<u32> {
    let [m, n, p] = shape;
    let key = |i: usize| {
        let (k, l, q) = (i % m, (i / m) % n, i / (m * n));
        (
            centered_index(q, p).unsigned_abs(),
            centered_index(l, n).unsigned_abs(),
            centered_index(k, m).unsigned_abs(),
            q,
            l,
            k,
        )
    };
    let mut order: Vec<usize> = (0..m * n * p).collect();
    order.sort_unstable_by_key(|&i| key(i));
    let mut rank = vec![0u32; order.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r as u32;
    }
    rank
}

/// Index with the best selection energy, resolving near-ties by rank.
///
/// `row_max[r]` must hold the largest energy in `energies[r * row_len..][..row_len]`;
/// rows whose maximum falls below the tie band are skipped.
pub(crate) fn pick(energies: &[f64], row_max: &[f64], row_len: usize, rank: &[u32]) -> usize {
    let max = row_max.iter().fold(0.0f64, |a, &b| if b > a { b } else { a });
    let threshold = max * (1.0 - TIE_TOLERANCE);
    let mut best = usize::MAX;
    let mut best_rank = u32::MAX;
    for (row, &rmax) in row_max.iter().enumerate() {
        if rmax < threshold {
            continue;
        }
        let start = row * row_len;
        for (i, (&e, &r)) in energies[start..start + row_len]
            .iter()
            .zip(&rank[start..start + row_len])
            .enumerate()
        {
            if e >= threshold && r < best_rank {
                best = start + i;
                best_rank = r;
            }
        }
    }
    best
}

/// One-off model generation for `area`; see [`ModelEngine`].
pub fn generate_model(area: &ReconstructionArea, config: &FsrConfig) -> Result<ModelOutput> {
    ModelEngine::new(config)?.generate(area)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsr::area::Category;
    use core::f64::consts::PI;

    fn small() -> FsrConfig {
        FsrConfig::with_geometry(4, 2)
    }

    #[test]
    fn rank_prefers_dc_then_positive_frequency() {
        let rank = selection_rank([8, 8, 8]);
        assert_eq!(rank[0], 0);
        // k = 1 and k = 7 share |k~| = 1; the positive index wins.
        assert!(rank[1] < rank[7]);
        // q dominates the ordering.
        assert!(rank[7] < rank[64]);
    }

    #[test]
    fn pick_breaks_ties_by_rank() {
        let rank = selection_rank([4, 1, 1]);
        let energies = [0.5, 1.0, 0.2, 1.0 - 1e-13];
        assert_eq!(pick(&energies, &[1.0], 4, &rank), 1);
        assert_eq!(pick(&energies, &[1.0, 1.0 - 1e-13], 2, &rank), 1);
        let energies = [0.5, 1.0 - 1e-13, 0.2, 1.0];
        assert_eq!(pick(&energies, &[1.0], 4, &rank), 1);
        assert_eq!(pick(&energies, &[0.5, 1.0], 2, &rank), 3);
        assert_eq!(pick(&[0.0; 4], &[0.0], 4, &rank), 0);
    }

    #[test]
    fn constant_area_converges_to_dc() {
        let cfg = FsrConfig {
            iterations: 60,
            ..small()
        };
        let len = 512;
        let category: Vec<Category> = (0..len)
            .map(|i| if i % 3 == 0 { Category::Support } else { Category::Loss })
            .collect();
        let signal: Vec<f64> = category
            .iter()
            .map(|&c| if c == Category::Support { 77.0 } else { 0.0 })
            .collect();
        let area = ReconstructionArea::from_parts(&cfg, signal, category).unwrap();
        let out = generate_model(&area, &cfg).unwrap();
        for v in &out.model {
            assert!((v - 77.0).abs() <= 1e-6 * 77.0, "{v}");
        }
    }

    #[test]
    fn pure_tone_single_iteration() {
        let cfg = FsrConfig {
            iterations: 1,
            rho_hat: 1.0,
            gamma: 1.0,
            ..small()
        };
        let signal: Vec<f64> = (0..512)
            .map(|i| (2.0 * PI * 2.0 * (i % 8) as f64 / 8.0).cos())
            .collect();
        let area = ReconstructionArea::from_parts(&cfg, signal, vec![Category::Support; 512]).unwrap();
        let mut energies = Vec::new();
        struct Record<'a>(&'a mut Vec<f64>);
        impl ModelObserver for Record<'_> {
            fn iteration(&mut self, step: &IterationStep<'_>) {
                self.0.push(step.weighted_energy.unwrap());
            }

            fn wants_weighted_energy(&self) -> bool {
                true
            }
        }
        let out = ModelEngine::new(&cfg)
            .unwrap()
            .generate_observed(&area, &mut Record(&mut energies))
            .unwrap();
        let idx = out.selections[0].index;
        assert!(idx == [2, 0, 0] || idx == [6, 0, 0], "{idx:?}");
        assert!(energies[0] <= 0.5 * out.initial_weighted_energy * (1.0 + 1e-12));
    }

    #[test]
    fn all_loss_is_degenerate() {
        let cfg = small();
        let area = ReconstructionArea::from_parts(&cfg, vec![0.0; 512], vec![Category::Loss; 512]).unwrap();
        assert!(matches!(generate_model(&area, &cfg), Err(Error::DegenerateCube(_))));
    }
}
