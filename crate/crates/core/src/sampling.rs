//! Sensor readout simulation for the 4-way shared pixel architecture with
//! randomized wiring.
//!
//! Every disjoint 2x2 pixel group shares four address lines labelled 1..=4;
//! the wiring assigns each label to exactly one pixel of the group, in a random
//! order per group. Activating a set of labels in a frame reads out the
//! corresponding pixel of every group, so the per-frame density is exact.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::rng::SeededRng;
use crate::volume::{Dims, Mask, Volume};
use crate::{Error, Result};

/// Offsets of the four pixels of a 2x2 group, in wiring order.
const GROUP_OFFSETS: [(usize, usize); 4] = [(0, 0), (1, 0), (0, 1), (1, 1)];

/// The 24 permutations of `[1, 2, 3, 4]` in lexicographic order.
pub fn label_permutations() -> [[u8; 4]; 24] {
    let mut out = [[0u8; 4]; 24];
    let mut n = 0;
    for a in 1..=4u8 {
        for b in 1..=4u8 {
            for c in 1..=4u8 {
                for d in 1..=4u8 {
                    if a != b && a != c && a != d && b != c && b != d && c != d {
                        out[n] = [a, b, c, d];
                        n += 1;
                    }
                }
            }
        }
    }
    out
}

/// Address-line label of every pixel position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelGrid {
    width: usize,
    height: usize,
    labels: Vec<u8>,
}

impl LabelGrid {
    /// Validates and wraps a row-major label buffer.
    pub fn from_labels(width: usize, height: usize, labels: Vec<u8>) -> Result<Self> {
        check_even(width, height)?;
        if labels.len() != width * height {
            return Err(Error::LengthMismatch {
                expected: width * height,
                actual: labels.len(),
            });
        }
        let grid = Self {
            width,
            height,
            labels,
        };
        for by in 0..height / 2 {
            for bx in 0..width / 2 {
                let mut block = grid.block(bx, by);
                block.sort_unstable();
                if block != [1, 2, 3, 4] {
                    return Err(Error::InvalidConfig(
                        "label grid block is not a permutation of 1..=4",
                    ));
                }
            }
        }
        Ok(grid)
    }

    /// Grid where every group uses the same wiring `perm`.
    pub fn uniform(width: usize, height: usize, perm: [u8; 4]) -> Result<Self> {
        check_even(width, height)?;
        let mut labels = vec![0u8; width * height];
        for y in 0..height {
            for x in 0..width {
                labels[y * width + x] = perm[(x & 1) + 2 * (y & 1)];
            }
        }
        Self::from_labels(width, height, labels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn label(&self, x: usize, y: usize) -> u8 {
        self.labels[y * self.width + x]
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// Labels of group `(bx, by)` in wiring order.
    pub fn block(&self, bx: usize, by: usize) -> [u8; 4] {
        GROUP_OFFSETS.map(|(dx, dy)| self.label(2 * bx + dx, 2 * by + dy))
    }

    /// Single-frame byte image of the labels (values 1..=4).
    pub fn to_bytes(&self) -> Vec<u8> {
        self.labels.clone()
    }
}

fn check_even(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 || !width.is_multiple_of(2) || !height.is_multiple_of(2) {
        return Err(Error::InvalidDims {
            width,
            height,
            frames: 1,
            reason: "sensor dimensions must be positive and even",
        });
    }
    Ok(())
}

/// Draws an independent uniform wiring permutation for every 2x2 group.
///
/// Groups are visited in raster order and each consumes one draw of
/// `below(24)` indexing [`label_permutations`].
pub fn gen_label_grid(width: usize, height: usize, seed: u64) -> Result<LabelGrid> {
    check_even(width, height)?;
    let perms = label_permutations();
    let mut rng = SeededRng::new(seed);
    let mut labels = vec![0u8; width * height];
    for by in 0..height / 2 {
        for bx in 0..width / 2 {
            let perm = perms[rng.below(24) as usize];
            for (&(dx, dy), &label) in GROUP_OFFSETS.iter().zip(perm.iter()) {
                labels[(2 * by + dy) * width + 2 * bx + dx] = label;
            }
        }
    }
    Ok(LabelGrid {
        width,
        height,
        labels,
    })
}

/// Set of activated address-line labels, bit `i` standing for label `i + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LabelSet(u8);

impl LabelSet {
    pub fn from_labels(labels: &[u8]) -> Self {
        Self(labels.iter().fold(0, |acc, &l| acc | 1 << (l - 1)))
    }

    #[inline]
    pub fn contains(self, label: u8) -> bool {
        (1..=4).contains(&label) && self.0 & (1 << (label - 1)) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn labels(self) -> Vec<u8> {
        (1..=4).filter(|&l| self.contains(l)).collect()
    }
}

impl fmt::Display for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, l) in self.labels().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str("}")
    }
}

/// Per-frame sets of activated labels, cycled over time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReadoutSchedule {
    density: u32,
    frame_sets: Vec<LabelSet>,
}

impl ReadoutSchedule {
    pub fn density(&self) -> u32 {
        self.density
    }

    pub fn period(&self) -> usize {
        self.frame_sets.len()
    }

    pub fn frame_sets(&self) -> &[LabelSet] {
        &self.frame_sets
    }

    /// Labels read out per 2x2 group in every frame.
    pub fn labels_per_group(&self) -> usize {
        self.density as usize / 25
    }

    pub fn set_for_step(&self, step: usize) -> LabelSet {
        self.frame_sets[step % self.frame_sets.len()]
    }
}

/// Canonical complementary readout order for a density.
///
/// 25%: single labels in ascending order. 75%: the complements of the 25%
/// order. 50%: the six pairs arranged so that every two consecutive steps
/// are complementary.
fn canonical_sets(density: u32) -> Result<Vec<LabelSet>> {
    let sets: Vec<&[u8]> = match density {
        25 => vec![&[1], &[2], &[3], &[4]],
        50 => vec![&[1, 2], &[3, 4], &[1, 3], &[2, 4], &[1, 4], &[2, 3]],
        75 => vec![&[2, 3, 4], &[1, 3, 4], &[1, 2, 4], &[1, 2, 3]],
        other => return Err(Error::UnsupportedDensity(other)),
    };
    Ok(sets.into_iter().map(LabelSet::from_labels).collect())
}

/// Builds the readout schedule for `density` percent.
///
/// With `variant_seed == None` the canonical order is used; otherwise the
/// canonical steps are shuffled with the seed.
pub fn make_schedule(density: u32, variant_seed: Option<u64>) -> Result<ReadoutSchedule> {
    let mut frame_sets = canonical_sets(density)?;
    if let Some(seed) = variant_seed {
        SeededRng::new(seed).shuffle(&mut frame_sets);
    }
    Ok(ReadoutSchedule {
        density,
        frame_sets,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SamplingMode {
    /// Same readout in every frame.
    Static,
    /// Complementary readouts cycled over the schedule period.
    Dynamic,
    /// Independent random positions per group and frame, ignoring the wiring.
    Random3d,
}

impl SamplingMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SamplingMode::Static => "static",
            SamplingMode::Dynamic => "dynamic",
            SamplingMode::Random3d => "random3d",
        }
    }
}

impl fmt::Display for SamplingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SamplingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "static" => Ok(SamplingMode::Static),
            "dynamic" => Ok(SamplingMode::Dynamic),
            "random3d" | "random" => Ok(SamplingMode::Random3d),
            _ => Err(Error::InvalidConfig("sampling mode must be static, dynamic or random3d")),
        }
    }
}

/// Mask generation parameters beyond grid and schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaskOptions {
    pub mode: SamplingMode,
    pub frames: usize,
    pub seed: u64,
    /// Give every two-row group its own seeded starting step in the schedule.
    pub row_offsets: bool,
}

/// Builds a sampling mask with row offsets disabled.
pub fn build_mask(
    grid: &LabelGrid,
    schedule: &ReadoutSchedule,
    frames: usize,
    mode: SamplingMode,
    seed: u64,
) -> Result<Mask> {
    build_mask_with(
        grid,
        schedule,
        MaskOptions {
            mode,
            frames,
            seed,
            row_offsets: false,
        },
    )
}

pub fn build_mask_with(grid: &LabelGrid, schedule: &ReadoutSchedule, opts: MaskOptions) -> Result<Mask> {
    let dims = Dims::new(grid.width(), grid.height(), opts.frames)?;
    check_even(dims.width, dims.height)?;
    let row_groups = dims.height / 2;
    let offsets: Vec<usize> = if opts.row_offsets {
        let mut rng = SeededRng::derived(opts.seed, 1);
        (0..row_groups)
            .map(|_| rng.below(schedule.period() as u32) as usize)
            .collect()
    } else {
        vec![0; row_groups]
    };

    let mut bits = vec![false; dims.len()];
    for (t, frame) in bits.chunks_mut(dims.frame_len()).enumerate() {
        match opts.mode {
            SamplingMode::Static | SamplingMode::Dynamic => {
                let step = if opts.mode == SamplingMode::Dynamic { t } else { 0 };
                for y in 0..dims.height {
                    let set = schedule.set_for_step(step + offsets[y / 2]);
                    for x in 0..dims.width {
                        frame[y * dims.width + x] = set.contains(grid.label(x, y));
                    }
                }
            }
            SamplingMode::Random3d => {
                let k = schedule.labels_per_group();
                let mut rng = SeededRng::derived(opts.seed, 2 + t as u64);
                for by in 0..row_groups {
                    for bx in 0..dims.width / 2 {
                        let mut order = [0usize, 1, 2, 3];
                        rng.shuffle(&mut order);
                        for &pos in &order[..k] {
                            let (dx, dy) = GROUP_OFFSETS[pos];
                            frame[(2 * by + dy) * dims.width + 2 * bx + dx] = true;
                        }
                    }
                }
            }
        }
    }
    Mask::new(dims, bits)
}

/// Multiplies the volume with the mask; missing positions become 0.
pub fn apply_mask(volume: &Volume, mask: &Mask) -> Result<(Volume, Mask)> {
    volume.dims().ensure_same(&mask.dims())?;
    let data = volume
        .as_slice()
        .iter()
        .zip(mask.as_slice())
        .map(|(&v, &m)| if m { v } else { 0.0 })
        .collect();
    Ok((Volume::new(volume.dims(), data)?, mask.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_block_is_a_permutation() {
        let g = gen_label_grid(16, 12, 5).unwrap();
        for by in 0..6 {
            for bx in 0..8 {
                let mut b = g.block(bx, by);
                b.sort_unstable();
                assert_eq!(b, [1, 2, 3, 4]);
            }
        }
    }

    #[test]
    fn grid_is_deterministic() {
        assert_eq!(gen_label_grid(8, 8, 42).unwrap(), gen_label_grid(8, 8, 42).unwrap());
        assert_ne!(gen_label_grid(8, 8, 42).unwrap(), gen_label_grid(8, 8, 43).unwrap());
    }

    #[test]
    fn odd_dimensions_rejected() {
        assert!(gen_label_grid(7, 8, 0).is_err());
        assert!(gen_label_grid(8, 9, 0).is_err());
    }

    #[test]
    fn permutation_table_is_complete() {
        let perms = label_permutations();
        for (i, p) in perms.iter().enumerate() {
            let mut s = *p;
            s.sort_unstable();
            assert_eq!(s, [1, 2, 3, 4]);
            for q in &perms[..i] {
                assert_ne!(p, q);
            }
        }
    }

    #[test]
    fn canonical_quarter_schedule() {
        let s = make_schedule(25, None).unwrap();
        let sets: Vec<Vec<u8>> = s.frame_sets().iter().map(|s| s.labels()).collect();
        assert_eq!(sets, vec![vec![1], vec![2], vec![3], vec![4]]);
    }

    #[test]
    fn three_quarter_schedule_counts() {
        let s = make_schedule(75, Some(3)).unwrap();
        assert_eq!(s.period(), 4);
        for label in 1..=4 {
            assert_eq!(s.frame_sets().iter().filter(|set| set.contains(label)).count(), 3);
        }
    }

    #[test]
    fn half_schedule_covers_all_pairs() {
        let s = make_schedule(50, Some(11)).unwrap();
        assert_eq!(s.period(), 6);
        let mut sets = s.frame_sets().to_vec();
        sets.sort_by_key(|s| s.0);
        sets.dedup();
        assert_eq!(sets.len(), 6);
        assert!(s.frame_sets().iter().all(|s| s.len() == 2));
    }

    #[test]
    fn unsupported_density() {
        assert_eq!(make_schedule(30, None), Err(Error::UnsupportedDensity(30)));
    }

    #[test]
    fn seeded_order_is_a_permutation_of_canonical() {
        let canonical = make_schedule(50, None).unwrap();
        let shuffled = make_schedule(50, Some(99)).unwrap();
        let mut a = canonical.frame_sets().to_vec();
        let mut b = shuffled.frame_sets().to_vec();
        a.sort_by_key(|s| s.0);
        b.sort_by_key(|s| s.0);
        assert_eq!(a, b);
    }

    #[test]
    fn static_mask_is_time_invariant() {
        let g = gen_label_grid(8, 6, 1).unwrap();
        let s = make_schedule(50, None).unwrap();
        let m = build_mask(&g, &s, 5, SamplingMode::Static, 0).unwrap();
        let d = m.dims();
        for t in 1..d.frames {
            for y in 0..d.height {
                for x in 0..d.width {
                    assert_eq!(m.get(x, y, t), m.get(x, y, 0));
                }
            }
        }
    }

    #[test]
    fn row_offsets_keep_density_and_period() {
        let g = gen_label_grid(12, 10, 2).unwrap();
        let s = make_schedule(25, None).unwrap();
        let opts = MaskOptions {
            mode: SamplingMode::Dynamic,
            frames: 8,
            seed: 5,
            row_offsets: true,
        };
        let m = build_mask_with(&g, &s, opts).unwrap();
        for t in 0..8 {
            assert_eq!(m.frame_count_ones(t), 30);
        }
        for y in 0..10 {
            for x in 0..12 {
                let hits = (0..4).filter(|&t| m.get(x, y, t)).count();
                assert_eq!(hits, 1);
            }
        }
    }

    #[test]
    fn random3d_is_seeded() {
        let g = gen_label_grid(8, 8, 1).unwrap();
        let s = make_schedule(25, None).unwrap();
        let a = build_mask(&g, &s, 4, SamplingMode::Random3d, 10).unwrap();
        let b = build_mask(&g, &s, 4, SamplingMode::Random3d, 10).unwrap();
        let c = build_mask(&g, &s, 4, SamplingMode::Random3d, 11).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn apply_mask_identities() {
        let dims = Dims::new(4, 4, 2).unwrap();
        let v = Volume::from_fn(dims, |x, y, t| (x + 4 * y + 16 * t) as f64);
        let (full, _) = apply_mask(&v, &Mask::filled(dims, true)).unwrap();
        assert_eq!(full, v);
        let (empty, _) = apply_mask(&v, &Mask::filled(dims, false)).unwrap();
        assert!(empty.as_slice().iter().all(|&s| s == 0.0));
    }

    #[test]
    fn apply_mask_shape_mismatch() {
        let v = Volume::filled(Dims::new(4, 4, 2).unwrap(), 1.0);
        let m = Mask::filled(Dims::new(4, 4, 3).unwrap(), true);
        assert!(matches!(apply_mask(&v, &m), Err(Error::ShapeMismatch { .. })));
    }
}
