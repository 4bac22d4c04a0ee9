use alloc::vec::Vec;

use super::area::{AreaBuilder, CubeOrigin, ReconstructionArea};
use super::model::{IterationStep, ModelEngine, ModelObserver, ModelOutput};
use super::order::plan_order;
use super::FsrConfig;
use crate::volume::{Mask, Volume};
use crate::Result;

/// Hooks into a running reconstruction. All methods default to no-ops.
pub trait ReconstructObserver {
    fn iteration(&mut self, _cube: CubeOrigin, _step: &IterationStep<'_>) {}
    fn cube_finished(&mut self, _cube: CubeOrigin, _output: &ModelOutput, _done: usize, _total: usize) {}
    /// Whether [`IterationStep::weighted_energy`] should be computed.
    fn wants_weighted_energy(&self) -> bool {
        false
    }
}

impl ReconstructObserver for () {}

/// Mutable state of a reconstruction: the working volume and which
/// positions have been filled so far.
///
/// Cubes can be processed in any order that respects the data dependencies;
/// [`reconstruct`] uses [`plan_order`] strictly sequentially.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    engine: ModelEngine,
    areas: AreaBuilder,
    values: Volume,
    known: Mask,
    reconstructed: Mask,
}

impl Reconstruction {
    pub fn new(sampled: &Volume, mask: &Mask, config: &FsrConfig) -> Result<Self> {
        sampled.dims().ensure_same(&mask.dims())?;
        Ok(Self {
            engine: ModelEngine::new(config)?,
            areas: AreaBuilder::new(config)?,
            values: sampled.clone(),
            known: mask.clone(),
            reconstructed: Mask::filled(mask.dims(), false),
        })
    }

    pub fn config(&self) -> &FsrConfig {
        self.engine.config()
    }

    pub fn engine(&self) -> &ModelEngine {
        &self.engine
    }

    pub fn known(&self) -> &Mask {
        &self.known
    }

    pub fn order(&self) -> Vec<CubeOrigin> {
        plan_order(&self.known, self.engine.config())
    }

    /// Current reconstruction area around `cube`.
    pub fn area(&self, cube: CubeOrigin) -> Result<ReconstructionArea> {
        self.areas.build(&self.values, &self.known, &self.reconstructed, cube)
    }

    /// Writes the model into the missing positions of `cube` and marks them
    /// reconstructed.
    pub fn commit(&mut self, cube: CubeOrigin, model: &[f64]) {
        let dims = self.values.dims();
        let cfg = *self.engine.config();
        let size = cfg.fft_size;
        let b = cfg.border_width;
        for t in cube.t..(cube.t + cfg.cube_size).min(dims.frames) {
            for y in cube.y..(cube.y + cfg.cube_size).min(dims.height) {
                for x in cube.x..(cube.x + cfg.cube_size).min(dims.width) {
                    let vi = dims.index(x, y, t);
                    if self.known.as_slice()[vi] {
                        continue;
                    }
                    let ai = ((t - cube.t + b) * size + (y - cube.y + b)) * size + (x - cube.x + b);
                    self.values.as_mut_slice()[vi] = model[ai];
                    self.reconstructed.as_mut_slice()[vi] = true;
                }
            }
        }
    }

    /// Reconstructs one cube against the current state and commits it.
    pub fn process(&mut self, cube: CubeOrigin, observer: &mut dyn ModelObserver) -> Result<ModelOutput> {
        let area = self.area(cube)?;
        let out = self.engine.generate_observed(&area, observer)?;
        self.commit(cube, &out.model);
        Ok(out)
    }

    /// Working volume at full precision.
    pub fn into_volume(self) -> Volume {
        self.values
    }
}

/// Reconstructs every missing sample of `sampled`; positions with `mask`
/// set are returned unchanged. Values are not clamped.
pub fn reconstruct(sampled: &Volume, mask: &Mask, config: &FsrConfig) -> Result<Volume> {
    reconstruct_observed(sampled, mask, config, &mut ())
}

pub fn reconstruct_observed(
    sampled: &Volume,
    mask: &Mask,
    config: &FsrConfig,
    observer: &mut dyn ReconstructObserver,
) -> Result<Volume> {
    let mut state = Reconstruction::new(sampled, mask, config)?;
    let order = state.order();
    let total = order.len();

    struct Forward<'a> {
        cube: CubeOrigin,
        inner: &'a mut dyn ReconstructObserver,
    }
    impl ModelObserver for Forward<'_> {
        fn iteration(&mut self, step: &IterationStep<'_>) {
            self.inner.iteration(self.cube, step);
        }
        fn wants_weighted_energy(&self) -> bool {
            self.inner.wants_weighted_energy()
        }
    }

    for (done, cube) in order.into_iter().enumerate() {
        let out = state.process(cube, &mut Forward { cube, inner: observer })?;
        observer.cube_finished(cube, &out, done + 1, total);
    }
    Ok(state.into_volume())
}
