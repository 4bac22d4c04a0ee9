//! Spatial-domain model generation by direct summation.
//!
//! Implements the same contract as [`super::generate_model`] without any
//! transform: projection coefficients, selection criterion, and model and
//! residual updates are evaluated sample by sample. The cost is
//! `O((M N P)^2)` per iteration, so it is meant for small areas in tests.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use super::area::ReconstructionArea;
use super::model::{pick, selection_rank, IterationStep, ModelObserver, ModelOutput, NoObserver, Selection};
use super::prior::{alpha, PriorBase};
use super::FsrConfig;
use crate::{Error, Result};

fn unit_roots(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|i| {
            let a = 2.0 * PI * i as f64 / n as f64;
            Complex64::new(libm::cos(a), libm::sin(a))
        })
        .collect()
}

pub fn generate_model_spatial_oracle(
    area: &ReconstructionArea,
    config: &FsrConfig,
) -> Result<ModelOutput> {
    generate_model_spatial_oracle_observed(area, config, &mut NoObserver)
}

/// Like [`generate_model_spatial_oracle`], reporting each iteration. Both
/// energies are summed directly; the reported spectra are empty.
pub fn generate_model_spatial_oracle_observed(
    area: &ReconstructionArea,
    config: &FsrConfig,
    observer: &mut dyn ModelObserver,
) -> Result<ModelOutput> {
    config.validate()?;
    let shape = area.shape();
    if shape != config.area_shape() {
        return Err(Error::InvalidConfig("area shape does not match the configuration"));
    }
    let omega = area.effective_data();
    if omega.is_nan() || omega <= 0.0 {
        return Err(Error::DegenerateCube(area.cube()));
    }
    let a = alpha(omega, config.tau)?;
    let wf = PriorBase::new(shape).weights(a).weights;
    let rank = selection_rank(shape);

    let [mm, nn, pp] = shape;
    let len = mm * nn * pp;
    let (em, en, ep) = (unit_roots(mm), unit_roots(nn), unit_roots(pp));
    let phi = |k: usize, l: usize, q: usize, m: usize, n: usize, p: usize| {
        em[(k * m) % mm] * en[(l * n) % nn] * ep[(q * p) % pp]
    };
    let w = area.weight();

    // Positions with nonzero weight; only these enter the projections.
    let support: Vec<(usize, usize, usize, usize)> = (0..len)
        .filter(|&i| w[i] != 0.0)
        .map(|i| (i, i % mm, (i / mm) % nn, i / (mm * nn)))
        .collect();

    // Denominator of every projection coefficient.
    let mut norms = vec![0.0; len];
    for (b, norm) in norms.iter_mut().enumerate() {
        let (k, l, q) = (b % mm, (b / mm) % nn, b / (mm * nn));
        *norm = support
            .iter()
            .map(|&(i, m, n, p)| phi(k, l, q, m, n, p).norm_sqr() * w[i])
            .sum();
    }

    let mut residual: Vec<Complex64> = area.signal().iter().map(|&s| Complex64::new(s, 0.0)).collect();
    let mut model = vec![Complex64::new(0.0, 0.0); len];
    let weighted_energy = |r: &[Complex64]| -> f64 { r.iter().zip(w).map(|(r, &w)| w * r.norm_sqr()).sum() };
    let residual_norm = |r: &[Complex64]| -> f64 { r.iter().zip(w).map(|(r, &w)| (r * w).norm_sqr()).sum() };
    let initial_weighted_energy = weighted_energy(&residual);
    let initial_residual_norm = residual_norm(&residual);

    let mut projections = vec![Complex64::new(0.0, 0.0); len];
    let mut criterion = vec![0.0; len];
    let mut selections = Vec::with_capacity(config.iterations);
    for iteration in 1..=config.iterations {
        let mut max = 0.0f64;
        for b in 0..len {
            let (k, l, q) = (b % mm, (b / mm) % nn, b / (mm * nn));
            let num: Complex64 = support
                .iter()
                .map(|&(i, m, n, p)| residual[i] * phi(k, l, q, m, n, p).conj() * w[i])
                .sum();
            let proj = num / norms[b];
            projections[b] = proj;
            criterion[b] = proj.norm_sqr() * wf[b] * norms[b];
            max = max.max(criterion[b]);
        }
        let best = pick(&criterion, &[max], len, &rank);
        let (u, v, z) = (best % mm, (best / mm) % nn, best / (mm * nn));
        let c = projections[best] * config.gamma;
        for p in 0..pp {
            for n in 0..nn {
                for m in 0..mm {
                    let i = (p * nn + n) * mm + m;
                    let f = c * phi(u, v, z, m, n, p);
                    model[i] += f;
                    residual[i] -= f;
                }
            }
        }
        let selection = Selection {
            index: [u, v, z],
            coefficient: c,
        };
        selections.push(selection);
        observer.iteration(&IterationStep {
            iteration,
            selection,
            weighted_energy: Some(weighted_energy(&residual)),
            weighted_residual_norm: residual_norm(&residual),
            residual_spectrum: (&[], &[]),
            model_spectrum: &[],
        });
    }

    Ok(ModelOutput {
        model: model.iter().map(|g| g.re).collect(),
        selections,
        omega,
        alpha: a,
        initial_weighted_energy,
        initial_residual_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsr::area::Category;

    #[test]
    fn all_loss_is_degenerate() {
        let cfg = FsrConfig::with_geometry(4, 2);
        let area = ReconstructionArea::from_parts(&cfg, vec![0.0; 512], vec![Category::Loss; 512]).unwrap();
        assert!(matches!(
            generate_model_spatial_oracle(&area, &cfg),
            Err(Error::DegenerateCube(_))
        ));
    }

    #[test]
    fn complete_basis_reproduces_signal() {
        let cfg = FsrConfig {
            rho_hat: 1.0,
            gamma: 1.0,
            iterations: 512,
            ..FsrConfig::with_geometry(4, 2)
        };
        let signal: Vec<f64> = (0..512)
            .map(|i| ((i * 37 + 11) % 97) as f64 * 1.5 - 20.0)
            .collect();
        let area = ReconstructionArea::from_parts(&cfg, signal.clone(), vec![Category::Support; 512]).unwrap();
        let out = generate_model_spatial_oracle(&area, &cfg).unwrap();
        for (g, s) in out.model.iter().zip(&signal) {
            assert!((g - s).abs() < 1e-9, "{g} vs {s}");
        }
    }
}
