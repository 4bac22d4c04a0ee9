//! Multi-threaded cube scheduling.
//!
//! Cubes are taken from the sequential processing order in batches. A cube
//! joins the current batch only if neither its cube nor its area overlaps
//! the cube of any earlier cube that is still pending, so every batch member
//! sees exactly the state it would see in strict sequential order. Models are
//! computed concurrently and committed in order, which makes the result
//! bit-identical for every thread count.

use std::collections::HashSet;
use std::num::NonZeroUsize;
use std::thread;

use fsr3d_core::fsr::{Reconstruction, ReconstructObserver};
use fsr3d_core::{CubeOrigin, FsrConfig, Mask, ModelOutput, Volume};

use crate::error::Result;

/// How far ahead of the oldest pending cube a batch may look.
const LOOKAHEAD: usize = 512;

/// Called after each committed cube with `(done, total)`.
pub trait Progress {
    fn cubes_done(&mut self, done: usize, total: usize);
}

impl Progress for () {
    fn cubes_done(&mut self, _done: usize, _total: usize) {}
}

impl<F: FnMut(usize, usize)> Progress for F {
    fn cubes_done(&mut self, done: usize, total: usize) {
        self(done, total)
    }
}

pub fn available_threads() -> usize {
    thread::available_parallelism().map(NonZeroUsize::get).unwrap_or(1)
}

/// Reconstructs with up to `threads` workers. `threads <= 1` runs the
/// sequential reference path.
pub fn reconstruct_threaded(
    sampled: &Volume,
    mask: &Mask,
    config: &FsrConfig,
    threads: usize,
    progress: &mut dyn Progress,
) -> Result<Volume> {
    if threads <= 1 {
        struct Forward<'a>(&'a mut dyn Progress);
        impl ReconstructObserver for Forward<'_> {
            fn cube_finished(&mut self, _: CubeOrigin, _: &ModelOutput, done: usize, total: usize) {
                self.0.cubes_done(done, total);
            }
        }
        return Ok(fsr3d_core::fsr::reconstruct_observed(
            sampled,
            mask,
            config,
            &mut Forward(progress),
        )?);
    }

    let mut state = Reconstruction::new(sampled, mask, config)?;
    let order = state.order();
    let total = order.len();
    let cs = config.cube_size;
    // Cubes whose grid coordinates differ by at most `reach` on every axis
    // can see each other.
    let reach = ((cs + config.border_width - 1) / cs) as isize;
    let cell = |c: CubeOrigin| [(c.x / cs) as isize, (c.y / cs) as isize, (c.t / cs) as isize];
    let max_batch = threads * 4;

    let mut pending = order;
    let mut done = 0;
    while !pending.is_empty() {
        let mut scanned: HashSet<[isize; 3]> = HashSet::new();
        let mut batch = Vec::new();
        let mut rest = Vec::with_capacity(pending.len());
        for (i, &cube) in pending.iter().enumerate() {
            if batch.len() >= max_batch || i >= LOOKAHEAD {
                rest.extend_from_slice(&pending[i..]);
                break;
            }
            let c = cell(cube);
            let blocked = (-reach..=reach).any(|dt| {
                (-reach..=reach).any(|dy| {
                    (-reach..=reach).any(|dx| scanned.contains(&[c[0] + dx, c[1] + dy, c[2] + dt]))
                })
            });
            scanned.insert(c);
            if blocked {
                rest.push(cube);
            } else {
                batch.push(cube);
            }
        }
        pending = rest;

        let areas = batch
            .iter()
            .map(|&c| state.area(c))
            .collect::<fsr3d_core::Result<Vec<_>>>()?;
        let engine = state.engine();
        let chunk = batch.len().div_ceil(threads);
        let models: Vec<fsr3d_core::Result<ModelOutput>> = thread::scope(|s| {
            let handles: Vec<_> = areas
                .chunks(chunk)
                .map(|part| s.spawn(move || part.iter().map(|a| engine.generate(a)).collect::<Vec<_>>()))
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("worker panicked"))
                .collect()
        });
        for (cube, out) in batch.into_iter().zip(models) {
            let out = out?;
            state.commit(cube, &out.model);
            done += 1;
            progress.cubes_done(done, total);
        }
    }
    Ok(state.into_volume())
}
