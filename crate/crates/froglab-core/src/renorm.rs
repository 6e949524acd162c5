//! Renormalized block couplings: the frog model coarse-grained onto a block
//! lattice whose "open" events dominate independent site percolation.
//!
//! Three tessellations are supported. Cubes of side `2K+1` (block `x` is
//! open when frog paths inside the cube connect its centre to the centres of
//! all `2d` neighbouring cubes), one-column segments of height `2K+1` for
//! `d = 2`, and side-3 prime cubes whose witness sets `W_x` collect the
//! sites within graph distance `a*d` of the cube centre — the geometry of
//! the good-vertex events in the death model.
//!
//! Block events are simulated directly: only frogs homed in the block
//! participate and only block sites count as frog-path intermediates, but
//! trajectories roam the infinite lattice (they are truncated by a step
//! budget only, which can only lower the open probability).

use crate::error::{Error, Result};
use crate::kernel::TransitionKernel;
use crate::lattice::{BoundaryMode, LatticeBox, Point};
use crate::percolation::PercolationField;
use crate::rng::{point_key, RngStream};
use crate::stats::{bernoulli_se, wilson_lower95};
use rand::Rng;
use std::collections::BTreeMap;
use std::collections::BTreeSet;

/// A block tessellation of `Z^d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RenormScheme {
    /// Cubes of side `2K+1` centred at `(2K+1) x`.
    Cube { k: u32 },
    /// Vertical segments of height `2K+1` at `(x_1, (2K+1) x_2)`; `d = 2`
    /// only.
    Segment { k: u32 },
    /// Side-3 cubes centred at `3x`, with witness sets
    /// `W_x = {y : ||y - 3x||_inf <= 1, ||y - 3x||_1 <= a d}`.
    PrimeCube { a: f64 },
}

impl RenormScheme {
    pub fn validate(&self, d: usize) -> Result<()> {
        match self {
            RenormScheme::Cube { .. } => Ok(()),
            RenormScheme::Segment { .. } => {
                if d == 2 {
                    Ok(())
                } else {
                    Err(Error::invalid("segment scheme is defined for d = 2"))
                }
            }
            RenormScheme::PrimeCube { a } => {
                if d < 2 {
                    return Err(Error::invalid("prime-cube scheme needs d >= 2"));
                }
                if !(2.0 / 3.0 < *a && *a < 1.0) {
                    return Err(Error::invalid("closeness fraction a must lie in (2/3, 1)"));
                }
                Ok(())
            }
        }
    }

    /// Centre site of block `x`.
    pub fn block_center(&self, block: &[i64]) -> Point {
        match self {
            RenormScheme::Cube { k } => {
                let m = 2 * *k as i64 + 1;
                block.iter().map(|&c| m * c).collect()
            }
            RenormScheme::Segment { k } => {
                let m = 2 * *k as i64 + 1;
                vec![block[0], m * block[1]]
            }
            RenormScheme::PrimeCube { .. } => block.iter().map(|&c| 3 * c).collect(),
        }
    }

    /// The sites of block `x` (the frog homes that participate in its
    /// event), as a box.
    pub fn block_box(&self, block: &[i64]) -> LatticeBox {
        let center = self.block_center(block);
        let radius = match self {
            RenormScheme::Cube { k } => *k as i64,
            RenormScheme::Segment { k } => *k as i64,
            RenormScheme::PrimeCube { .. } => 1,
        };
        let (lo, hi): (Vec<i64>, Vec<i64>) = match self {
            RenormScheme::Segment { .. } => (
                vec![center[0], center[1] - radius],
                vec![center[0], center[1] + radius],
            ),
            _ => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
        };
        LatticeBox::new(lo, hi, BoundaryMode::Killing).expect("valid block box")
    }

    /// Does `p` witness entry into block `x` (a centre hit for cube and
    /// segment schemes, a `W_x` hit for prime cubes)?
    fn is_witness(&self, d: usize, block: &[i64], p: &[i64]) -> bool {
        let center = self.block_center(block);
        match self {
            RenormScheme::Cube { .. } | RenormScheme::Segment { .. } => p == center.as_slice(),
            RenormScheme::PrimeCube { a } => {
                let mut l1 = 0i64;
                for (x, c) in p.iter().zip(&center) {
                    let diff = (x - c).abs();
                    if diff > 1 {
                        return false;
                    }
                    l1 += diff;
                }
                l1 as f64 <= a * d as f64
            }
        }
    }

    /// All witness sites of block `x` in lexicographic order.
    pub fn witness_sites(&self, d: usize, block: &[i64]) -> Vec<Point> {
        match self {
            RenormScheme::Cube { .. } | RenormScheme::Segment { .. } => {
                vec![self.block_center(block)]
            }
            RenormScheme::PrimeCube { .. } => self
                .block_box(block)
                .iter_points()
                .filter(|p| self.is_witness(d, block, p))
                .collect(),
        }
    }

    /// Default per-frog step budget for block events.
    pub fn default_block_steps(&self) -> usize {
        match self {
            RenormScheme::Cube { k } | RenormScheme::Segment { k } => {
                let side = 2 * *k as usize + 1;
                100 * side * side
            }
            // death caps trajectories; the budget is a backstop
            RenormScheme::PrimeCube { .. } => 10_000,
        }
    }
}

/// Outcome of a single block event.
#[derive(Clone, Debug)]
pub struct BlockOutcome {
    /// Every neighbouring witness set was reached.
    pub open: bool,
    /// Per direction (`+e1, -e1, +e2, ...`): the witness sites of the
    /// neighbouring block reached by frog paths from the seed.
    pub reached_witnesses: Vec<Vec<Point>>,
}

/// Simulate one block event: frogs homed in the block, seeded at `seed`,
/// frog paths restricted to block sites, trajectories free. Records which
/// witness sites of each neighbouring block are reached.
pub fn block_event(
    scheme: &RenormScheme,
    kernel: &TransitionKernel,
    survival: f64,
    block: &[i64],
    seed: &Point,
    max_steps: usize,
    stream: &RngStream,
) -> Result<BlockOutcome> {
    let d = kernel.d();
    scheme.validate(d)?;
    if block.len() != d || seed.len() != d {
        return Err(Error::invalid("block index and seed must match the dimension"));
    }
    if !(0.0..=1.0).contains(&survival) {
        return Err(Error::invalid("survival must lie in [0,1]"));
    }
    let home_box = scheme.block_box(block);
    if !home_box.contains(seed) {
        return Err(Error::invalid("seed must lie inside the block"));
    }
    let n_homes = home_box.site_count()?;

    // neighbouring blocks in direction order +e1, -e1, +e2, ...
    let mut neighbours = Vec::with_capacity(2 * d);
    for axis in 0..d {
        for delta in [1i64, -1] {
            let mut nb = block.to_vec();
            nb[axis] += delta;
            neighbours.push(nb);
        }
    }

    // fast-reject envelope around everything we must inspect per step
    let mut env_lo = home_box.lo().to_vec();
    let mut env_hi = home_box.hi().to_vec();
    for nb in &neighbours {
        let b = scheme.block_box(nb);
        for axis in 0..d {
            env_lo[axis] = env_lo[axis].min(b.lo()[axis]);
            env_hi[axis] = env_hi[axis].max(b.hi()[axis]);
        }
    }

    let mut awake = vec![false; n_homes];
    let mut queue: Vec<usize> = Vec::new();
    let seed_idx = home_box.index(seed).expect("seed inside block");
    awake[seed_idx] = true;
    queue.push(seed_idx);

    let mut reached: Vec<BTreeSet<Point>> = vec![BTreeSet::new(); 2 * d];
    let mut pos = vec![0i64; d];
    while let Some(home_idx) = queue.pop() {
        let home = home_box.point_at(home_idx);
        let frog_stream = stream.child(point_key(&home));
        let mut movement = frog_stream.child(0).rng();
        let mut budget = max_steps as u64;
        if survival < 1.0 {
            let mut death = frog_stream.child(1).rng();
            budget = budget.min(crate::frog::sample_lifetime(survival, &mut death));
        }
        pos.copy_from_slice(&home);
        for _ in 0..budget {
            let Some(dir) = kernel.sample_step(&mut movement) else {
                continue;
            };
            dir.step(&mut pos);
            let in_envelope = pos
                .iter()
                .zip(env_lo.iter().zip(&env_hi))
                .all(|(x, (l, h))| x >= l && x <= h);
            if !in_envelope {
                continue;
            }
            if let Some(idx) = home_box.index(&pos) {
                if !awake[idx] {
                    awake[idx] = true;
                    queue.push(idx);
                }
                continue;
            }
            for (e, nb) in neighbours.iter().enumerate() {
                if scheme.is_witness(d, nb, &pos) {
                    reached[e].insert(pos.clone());
                    break;
                }
            }
        }
    }

    let open = reached.iter().all(|set| !set.is_empty());
    Ok(BlockOutcome {
        open,
        reached_witnesses: reached
            .into_iter()
            .map(|set| set.into_iter().collect())
            .collect(),
    })
}

/// Monte Carlo estimate of the block-open probability for the given block
/// index, seeded at its centre.
pub fn renorm_open_probability(
    scheme: &RenormScheme,
    kernel: &TransitionKernel,
    survival: f64,
    block: &[i64],
    trials: u64,
    stream: &RngStream,
) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    let seed = scheme.block_center(block);
    let steps = scheme.default_block_steps();
    let mut hits = 0u64;
    for trial in 0..trials {
        let outcome = block_event(
            scheme,
            kernel,
            survival,
            block,
            &seed,
            steps,
            &stream.child(trial),
        )?;
        if outcome.open {
            hits += 1;
        }
    }
    let p = hits as f64 / trials as f64;
    Ok((p, bernoulli_se(p, trials)))
}

fn validate_good_vertex(d: usize, survival: f64, a: f64) -> Result<()> {
    if d < 2 {
        return Err(Error::invalid("good-vertex events need d >= 2"));
    }
    if !(survival > 0.75 && survival < 1.0) {
        return Err(Error::invalid("good-vertex events need survival in (3/4, 1)"));
    }
    if !(2.0 / 3.0 < a && a < 2.0 - 1.0 / survival) {
        return Err(Error::invalid(
            "closeness fraction must satisfy 2/3 < a < 2 - 1/s",
        ));
    }
    Ok(())
}

/// Probability that `o` is good in `FM*(d, pi_sym, s)`: from `o`, frog paths
/// inside the prime cube reach some witness site of every neighbouring
/// cube.
pub fn good_vertex_probability(
    d: usize,
    survival: f64,
    a: f64,
    o: &Point,
    trials: u64,
    stream: &RngStream,
) -> Result<(f64, f64)> {
    validate_good_vertex(d, survival, a)?;
    let scheme = RenormScheme::PrimeCube { a };
    let block = vec![0i64; d];
    if !scheme.is_witness(d, &block, o) {
        return Err(Error::invalid("o must lie in the witness set W_0"));
    }
    let kernel = TransitionKernel::symmetric(d);
    let steps = scheme.default_block_steps();
    let mut hits = 0u64;
    for trial in 0..trials {
        let outcome = block_event(
            &scheme,
            &kernel,
            survival,
            &block,
            o,
            steps,
            &stream.child(trial),
        )?;
        if outcome.open {
            hits += 1;
        }
    }
    let p = hits as f64 / trials as f64;
    Ok((p, bernoulli_se(p, trials)))
}

/// Pre-estimated good-vertex probabilities per witness offset, with the
/// uniform lower confidence bound used as the thinning target.
#[derive(Clone, Debug)]
pub struct GoodVertexTable {
    pub survival: f64,
    pub a: f64,
    /// Offset within `W_0` -> estimated `P(o good)`.
    pub per_offset: BTreeMap<Point, f64>,
    /// Uniform lower bound `beta <= min_o P(o good)` (95% Wilson bound).
    pub beta: f64,
    pub trials_per_offset: u64,
}

/// Estimate `P(o good)` for every witness offset and derive the uniform
/// thinning level `beta`.
pub fn estimate_good_table(
    d: usize,
    survival: f64,
    a: f64,
    trials_per_offset: u64,
    stream: &RngStream,
) -> Result<GoodVertexTable> {
    validate_good_vertex(d, survival, a)?;
    let scheme = RenormScheme::PrimeCube { a };
    let block = vec![0i64; d];
    let offsets = scheme.witness_sites(d, &block);
    let mut per_offset = BTreeMap::new();
    let mut beta = f64::INFINITY;
    for (i, o) in offsets.iter().enumerate() {
        let sub = stream.child(i as u64);
        let kernel = TransitionKernel::symmetric(d);
        let steps = scheme.default_block_steps();
        let mut hits = 0u64;
        for trial in 0..trials_per_offset {
            let outcome = block_event(
                &scheme,
                &kernel,
                survival,
                &block,
                o,
                steps,
                &sub.child(trial),
            )?;
            if outcome.open {
                hits += 1;
            }
        }
        per_offset.insert(o.clone(), hits as f64 / trials_per_offset as f64);
        beta = beta.min(wilson_lower95(hits, trials_per_offset));
    }
    if beta <= 0.0 {
        return Err(Error::Numerical(
            "no positive uniform lower bound on the good-vertex probability at this sample size"
                .into(),
        ));
    }
    Ok(GoodVertexTable {
        survival,
        a,
        per_offset,
        beta,
        trials_per_offset,
    })
}

/// Outcome of the renormalized exploration.
#[derive(Clone, Debug)]
pub struct ExplorationOutcome {
    /// Reached block indices, in exploration order (the seed first).
    pub reached: Vec<Point>,
    /// Dead block indices.
    pub dead: Vec<Point>,
    /// Accept/reject indicator of every evaluated block, in evaluation
    /// order. With thinning these are i.i.d. Bernoulli(beta).
    pub acceptance: Vec<bool>,
}

/// Explore the frog cluster block by block, coupling it to independent site
/// percolation.
///
/// Unexplored blocks adjacent to the reached set are evaluated in a fixed
/// lexicographic order. Each evaluation seeds the block at the
/// lexicographically smallest witness site reached from its neighbours,
/// simulates the local event with fresh frog randomness, and — when a
/// thinning table is supplied — additionally accepts with probability
/// `beta / P(seed good)`, so every acceptance is a Bernoulli(beta) draw
/// independent of the exploration history.
pub fn renormalized_frog_exploration(
    scheme: &RenormScheme,
    kernel: &TransitionKernel,
    survival: f64,
    seed_block: &[i64],
    block_arena: &LatticeBox,
    thinning: Option<&GoodVertexTable>,
    stream: &RngStream,
) -> Result<ExplorationOutcome> {
    let d = kernel.d();
    scheme.validate(d)?;
    if block_arena.d() != d || !block_arena.contains(seed_block) {
        return Err(Error::invalid("seed block must lie inside the block arena"));
    }
    let steps = scheme.default_block_steps();

    let mut outcome = ExplorationOutcome {
        reached: Vec::new(),
        dead: Vec::new(),
        acceptance: Vec::new(),
    };
    let mut outcomes: BTreeMap<Point, BlockOutcome> = BTreeMap::new();
    let mut explored: BTreeSet<Point> = BTreeSet::new();

    let evaluate = |block: &Point,
                        entry: &Point,
                        outcome_acc: &mut ExplorationOutcome|
     -> Result<Option<BlockOutcome>> {
        let block_stream = stream.child(point_key(block));
        let event = block_event(scheme, kernel, survival, block, entry, steps, &block_stream)?;
        let mut accept = event.open;
        if let Some(table) = thinning {
            let center = scheme.block_center(block);
            let offset: Point = entry.iter().zip(&center).map(|(e, c)| e - c).collect();
            let p_o = *table
                .per_offset
                .get(&offset)
                .ok_or_else(|| Error::invalid("entry offset missing from good-vertex table"))?;
            if p_o <= 0.0 {
                accept = false;
            } else if accept {
                let u: f64 = block_stream.child(u64::MAX).rng().gen();
                accept = u < (table.beta / p_o).min(1.0);
            }
        }
        outcome_acc.acceptance.push(accept);
        Ok(if accept { Some(event) } else { None })
    };

    // seed step
    explored.insert(seed_block.to_vec());
    let seed_entry = scheme.block_center(seed_block);
    match evaluate(&seed_block.to_vec(), &seed_entry, &mut outcome)? {
        Some(event) => {
            outcomes.insert(seed_block.to_vec(), event);
            outcome.reached.push(seed_block.to_vec());
        }
        None => {
            outcome.dead.push(seed_block.to_vec());
            return Ok(outcome);
        }
    }

    loop {
        // unexplored blocks adjacent to the reached set, smallest first
        let mut frontier: BTreeSet<Point> = BTreeSet::new();
        for r in &outcome.reached {
            for axis in 0..d {
                for delta in [1i64, -1] {
                    let mut nb = r.clone();
                    nb[axis] += delta;
                    if block_arena.contains(&nb) && !explored.contains(&nb) {
                        frontier.insert(nb);
                    }
                }
            }
        }
        let Some(next) = frontier.into_iter().next() else {
            break;
        };
        explored.insert(next.clone());

        // entry witnesses recorded by reached neighbours toward `next`
        let mut candidates: BTreeSet<Point> = BTreeSet::new();
        for axis in 0..d {
            for (e_index, delta) in [(0usize, 1i64), (1usize, -1i64)] {
                let mut nb = next.clone();
                nb[axis] += delta;
                if let Some(event) = outcomes.get(&nb) {
                    // direction from nb toward next is the opposite of delta
                    let dir_index = 2 * axis + (1 - e_index);
                    for w in &event.reached_witnesses[dir_index] {
                        candidates.insert(w.clone());
                    }
                }
            }
        }
        let Some(entry) = candidates.into_iter().next() else {
            outcome.dead.push(next);
            continue;
        };
        match evaluate(&next, &entry, &mut outcome)? {
            Some(event) => {
                outcomes.insert(next.clone(), event);
                outcome.reached.push(next);
            }
            None => outcome.dead.push(next),
        }
    }
    Ok(outcome)
}

/// Explore an independent site-percolation cluster on the block arena at
/// parameter `beta` — the comparison object for the exploration coupling.
pub fn independent_block_cluster(
    beta: f64,
    seed_block: &[i64],
    block_arena: &LatticeBox,
    stream: &RngStream,
) -> Result<Vec<Point>> {
    let field =
        crate::percolation::sample_field(block_arena.d(), beta, block_arena, stream)?;
    let cluster = crate::percolation::explore_cluster(&field, seed_block)?;
    Ok(cluster.members)
}

/// Recover a percolation-style field view of a finished exploration (open =
/// reached), for reuse of cluster utilities in diagnostics.
pub fn exploration_as_field(
    outcome: &ExplorationOutcome,
    block_arena: &LatticeBox,
) -> Result<PercolationField> {
    let n = block_arena.site_count()?;
    let mut open = vec![false; n];
    for b in &outcome.reached {
        if let Some(i) = block_arena.index(b) {
            open[i] = true;
        }
    }
    PercolationField::from_bitmap(f64::NAN, block_arena.clone(), open)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_geometry() {
        let scheme = RenormScheme::Cube { k: 2 };
        assert_eq!(scheme.block_center(&[1, -1]), vec![5, -5]);
        let b = scheme.block_box(&[0, 0]);
        assert_eq!(b.site_count().unwrap(), 25);
        assert!(b.contains(&[2, -2]));
        assert!(!b.contains(&[3, 0]));
    }

    #[test]
    fn segment_geometry() {
        let scheme = RenormScheme::Segment { k: 3 };
        assert_eq!(scheme.block_center(&[4, 1]), vec![4, 7]);
        let b = scheme.block_box(&[4, 1]);
        assert_eq!(b.site_count().unwrap(), 7);
        assert!(b.contains(&[4, 10]));
        assert!(!b.contains(&[5, 7]));
        assert!(scheme.validate(3).is_err());
    }

    #[test]
    fn prime_cube_witnesses() {
        let scheme = RenormScheme::PrimeCube { a: 0.7 };
        // d = 3: a*d = 2.1, so witness sites have L1 distance <= 2
        let w = scheme.witness_sites(3, &[0, 0, 0]);
        assert!(w.contains(&vec![0, 0, 0]));
        assert!(w.contains(&vec![1, 1, 0]));
        assert!(!w.contains(&vec![1, 1, 1]));
        assert_eq!(w.len(), 1 + 6 + 12);
    }

    #[test]
    fn balanced_two_dimensional_cube_blocks_open() {
        // recurrent planar walks connect the centres essentially always
        let scheme = RenormScheme::Cube { k: 2 };
        let kernel = TransitionKernel::new(2, 0.5, 0.0).unwrap();
        let (p, _) =
            renorm_open_probability(&scheme, &kernel, 1.0, &[0, 0], 40, &RngStream::from_root(1))
                .unwrap();
        assert_eq!(p, 1.0);
    }

    #[test]
    fn axis_only_kernel_never_opens_2d_blocks() {
        // w = 1 has no lateral motion, so the ±e2 centres are unreachable
        let scheme = RenormScheme::Cube { k: 1 };
        let kernel = TransitionKernel::new(2, 1.0, 0.3).unwrap();
        let (p, _) =
            renorm_open_probability(&scheme, &kernel, 1.0, &[0, 0], 30, &RngStream::from_root(2))
                .unwrap();
        assert_eq!(p, 0.0);
    }

    #[test]
    fn block_open_probability_is_translation_invariant() {
        let scheme = RenormScheme::Cube { k: 1 };
        let kernel = TransitionKernel::new(2, 0.5, 0.25).unwrap();
        let trials = 400;
        let (p0, se0) = renorm_open_probability(
            &scheme,
            &kernel,
            1.0,
            &[0, 0],
            trials,
            &RngStream::from_root(3),
        )
        .unwrap();
        let (p1, se1) = renorm_open_probability(
            &scheme,
            &kernel,
            1.0,
            &[7, -4],
            trials,
            &RngStream::from_root(3).child(9),
        )
        .unwrap();
        let se = (se0 * se0 + se1 * se1).sqrt();
        assert!((p0 - p1).abs() <= 4.0 * se, "p0 {p0} p1 {p1} se {se}");
    }

    #[test]
    fn good_vertex_parameter_domain() {
        let o = vec![0, 0, 0];
        // a >= 2 - 1/s rejected
        assert!(good_vertex_probability(3, 0.8, 0.76, &o, 10, &RngStream::from_root(4)).is_err());
        // s <= 3/4 rejected
        assert!(good_vertex_probability(3, 0.7, 0.7, &o, 10, &RngStream::from_root(4)).is_err());
        // valid corner works
        assert!(good_vertex_probability(3, 0.9, 0.7, &o, 10, &RngStream::from_root(4)).is_ok());
    }

    #[test]
    fn good_vertex_positive_at_center() {
        let (p, _) = good_vertex_probability(
            3,
            0.9,
            0.7,
            &vec![0, 0, 0],
            2000,
            &RngStream::from_root(5),
        )
        .unwrap();
        assert!(p > 0.0, "good-vertex probability {p}");
    }

    #[test]
    fn good_vertex_monotone_in_survival_under_coupling() {
        // same streams: longer lifetimes only extend trajectories
        let o = vec![0, 0, 0];
        let stream = RngStream::from_root(6);
        let scheme = RenormScheme::PrimeCube { a: 0.7 };
        let kernel = TransitionKernel::symmetric(3);
        let block = vec![0i64; 3];
        let steps = scheme.default_block_steps();
        for trial in 0..300u64 {
            let low = block_event(&scheme, &kernel, 0.8, &block, &o, steps, &stream.child(trial))
                .unwrap();
            let high =
                block_event(&scheme, &kernel, 0.95, &block, &o, steps, &stream.child(trial))
                    .unwrap();
            assert!(
                !low.open || high.open,
                "trial {trial}: open at s=0.8 but closed at s=0.95"
            );
        }
    }

    #[test]
    fn exploration_fills_arena_in_the_trivial_phase() {
        // s = 1, balanced d = 2, cube scheme: every block event succeeds
        let scheme = RenormScheme::Cube { k: 2 };
        let kernel = TransitionKernel::new(2, 0.5, 0.0).unwrap();
        let arena = LatticeBox::centered(2, 2, BoundaryMode::Killing);
        let outcome = renormalized_frog_exploration(
            &scheme,
            &kernel,
            1.0,
            &[0, 0],
            &arena,
            None,
            &RngStream::from_root(7),
        )
        .unwrap();
        assert_eq!(outcome.reached.len(), 25, "dead: {:?}", outcome.dead);
    }

    #[test]
    fn segment_blocks_open_in_the_balanced_plane() {
        // vertical-segment tessellation: a segment holds only 2K+1 frogs, so
        // the truncation bias is heavier than for cubes; with a generous
        // budget the balanced plane still opens almost every block
        let scheme = RenormScheme::Segment { k: 2 };
        let kernel = TransitionKernel::new(2, 0.5, 0.0).unwrap();
        let seed = scheme.block_center(&[0, 0]);
        let trials = 100u64;
        let stream = RngStream::from_root(21);
        let mut open_short = 0u64;
        let mut open_long = 0u64;
        for t in 0..trials {
            let run = |steps: usize| {
                block_event(&scheme, &kernel, 1.0, &[0, 0], &seed, steps, &stream.child(t))
                    .unwrap()
                    .open
            };
            let short = run(scheme.default_block_steps());
            let long = run(10 * scheme.default_block_steps());
            // same streams: a longer budget only extends trajectories
            assert!(!short || long, "trial {t}: openness lost with more steps");
            open_short += short as u64;
            open_long += long as u64;
        }
        let p = open_long as f64 / trials as f64;
        assert!(p >= 0.8, "segment openness {p}");
        assert!(open_long > open_short, "budget did not reduce the bias");
        // with full drift nothing travels left, so segments never open
        let drifted = TransitionKernel::new(2, 0.5, 1.0).unwrap();
        let (p, _) = renorm_open_probability(
            &scheme,
            &drifted,
            1.0,
            &[0, 0],
            40,
            &RngStream::from_root(22),
        )
        .unwrap();
        assert_eq!(p, 0.0);
    }

    #[test]
    fn rejected_seed_stops_exploration() {
        // no lateral motion: the seed block event fails immediately
        let scheme = RenormScheme::Cube { k: 1 };
        let kernel = TransitionKernel::new(2, 1.0, 0.5).unwrap();
        let arena = LatticeBox::centered(2, 2, BoundaryMode::Killing);
        let outcome = renormalized_frog_exploration(
            &scheme,
            &kernel,
            1.0,
            &[0, 0],
            &arena,
            None,
            &RngStream::from_root(8),
        )
        .unwrap();
        assert!(outcome.reached.is_empty());
        assert_eq!(outcome.acceptance, vec![false]);
    }
}
