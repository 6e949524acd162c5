//! Independent site percolation on `Z^d`: field sampling, open-cluster
//! exploration, the density statistic, and critical-point estimation from
//! spanning thresholds.
//!
//! The spanning machinery works per realization: sites carry i.i.d. uniform
//! marks, and inserting them in increasing mark order into a union-find
//! structure yields the exact threshold `u*` at which the configuration
//! first spans the box along the first axis. The empirical law of `u*` is
//! then the whole spanning-probability curve `S_L(p) = P(u* <= p)` at once,
//! exactly coupled across `p` by shared uniforms.

use crate::error::{Error, Result};
use crate::lattice::{LatticeBox, Point};
use crate::rng::RngStream;
use rand::Rng;
use std::collections::BTreeSet;

/// A sampled open/closed configuration on a finite box.
#[derive(Clone, Debug)]
pub struct PercolationField {
    d: usize,
    p: f64,
    arena: LatticeBox,
    open: Vec<bool>,
}

impl PercolationField {
    pub fn d(&self) -> usize {
        self.d
    }
    pub fn p(&self) -> f64 {
        self.p
    }
    pub fn arena(&self) -> &LatticeBox {
        &self.arena
    }

    pub fn is_open(&self, site: &[i64]) -> bool {
        self.arena.index(site).map(|i| self.open[i]).unwrap_or(false)
    }

    pub fn open_count(&self) -> usize {
        self.open.iter().filter(|&&b| b).count()
    }

    pub fn site_count(&self) -> usize {
        self.open.len()
    }

    /// Build a field from an explicit bitmap in lexicographic site order
    /// (used by exhaustive test oracles).
    pub fn from_bitmap(p: f64, arena: LatticeBox, open: Vec<bool>) -> Result<Self> {
        if open.len() != arena.site_count()? {
            return Err(Error::invalid("bitmap length must match box size"));
        }
        Ok(PercolationField {
            d: arena.d(),
            p,
            arena,
            open,
        })
    }
}

/// Sample an i.i.d. Bernoulli(p) field on the box.
pub fn sample_field(
    d: usize,
    p: f64,
    arena: &LatticeBox,
    stream: &RngStream,
) -> Result<PercolationField> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid("p must lie in [0,1]"));
    }
    if arena.d() != d {
        return Err(Error::invalid("box dimension mismatch"));
    }
    let n = arena.site_count()?;
    let mut rng = stream.rng();
    let open = (0..n).map(|_| rng.gen::<f64>() < p).collect();
    Ok(PercolationField {
        d,
        p,
        arena: arena.clone(),
        open,
    })
}

/// An open cluster: the queried root and its members (empty if the root is
/// closed).
#[derive(Clone, Debug, PartialEq)]
pub struct Cluster {
    pub root: Point,
    pub members: Vec<Point>,
}

impl Cluster {
    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        self.members.iter().any(|m| m == p)
    }
}

/// Explore the open cluster of `x` within the field's box, visiting sites in
/// a fixed lexicographic order.
pub fn explore_cluster(field: &PercolationField, x: &[i64]) -> Result<Cluster> {
    if !field.arena.contains(x) {
        return Err(Error::invalid("exploration root must lie in the box"));
    }
    let mut members = Vec::new();
    if !field.is_open(x) {
        return Ok(Cluster {
            root: x.to_vec(),
            members,
        });
    }
    let mut seen: BTreeSet<Point> = BTreeSet::new();
    let mut frontier: BTreeSet<Point> = BTreeSet::new();
    seen.insert(x.to_vec());
    frontier.insert(x.to_vec());
    while let Some(cur) = frontier.pop_first() {
        members.push(cur.clone());
        for axis in 0..field.d {
            for delta in [-1i64, 1] {
                let mut nb = cur.clone();
                nb[axis] += delta;
                if field.is_open(&nb) && !seen.contains(&nb) {
                    seen.insert(nb.clone());
                    frontier.insert(nb);
                }
            }
        }
    }
    Ok(Cluster {
        root: x.to_vec(),
        members,
    })
}

/// The density event `|region ∩ cluster| >= a * |region|`.
pub fn density_indicator(cluster: &Cluster, region: &[Point], a: f64) -> Result<bool> {
    if region.is_empty() {
        return Err(Error::invalid("density region must be non-empty"));
    }
    let hits = region.iter().filter(|p| cluster.contains(p)).count();
    Ok(hits as f64 >= a * region.len() as f64)
}

/// Empirical frequency of the density event over fresh fields.
#[allow(clippy::too_many_arguments)]
pub fn density_frequency(
    d: usize,
    p: f64,
    arena: &LatticeBox,
    root: &[i64],
    region: &[Point],
    a: f64,
    trials: u64,
    stream: &RngStream,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    let mut hits = 0u64;
    for trial in 0..trials {
        let field = sample_field(d, p, arena, &stream.child(trial))?;
        let cluster = explore_cluster(&field, root)?;
        if density_indicator(&cluster, region, a)? {
            hits += 1;
        }
    }
    Ok(hits as f64 / trials as f64)
}

/// Union-find with path halving and union by size.
struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            self.parent[x as usize] = self.parent[self.parent[x as usize] as usize];
            x = self.parent[x as usize];
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
    }
}

/// Exact spanning threshold of one uniform-mark realization on `[0,L)^d`:
/// the smallest `p` at which the open sites `{u_i < p}` connect the face
/// `x_1 = 0` to the face `x_1 = L-1`.
pub fn spanning_threshold(d: usize, size: usize, stream: &RngStream) -> Result<f64> {
    if d < 2 || size < 2 {
        return Err(Error::invalid("spanning needs d >= 2 and size >= 2"));
    }
    let n: usize = size.pow(d as u32);
    if n > (1 << 27) {
        return Err(Error::Resource(format!(
            "spanning box has {n} sites; shrink size"
        )));
    }
    let mut rng = stream.rng();
    let mut marks: Vec<(f64, u32)> = (0..n as u32).map(|i| (rng.gen::<f64>(), i)).collect();
    marks.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let left = n as u32;
    let right = n as u32 + 1;
    let mut uf = UnionFind::new(n + 2);
    let mut added = vec![false; n];
    // strides for [0,L)^d, axis 0 slowest
    let mut strides = vec![1usize; d];
    for axis in (0..d - 1).rev() {
        strides[axis] = strides[axis + 1] * size;
    }
    for &(u, site) in &marks {
        let s = site as usize;
        added[s] = true;
        let x1 = s / strides[0];
        if x1 == 0 {
            uf.union(site, left);
        }
        if x1 == size - 1 {
            uf.union(site, right);
        }
        for axis in 0..d {
            let coord = (s / strides[axis]) % size;
            if coord > 0 && added[s - strides[axis]] {
                uf.union(site, (s - strides[axis]) as u32);
            }
            if coord + 1 < size && added[s + strides[axis]] {
                uf.union(site, (s + strides[axis]) as u32);
            }
        }
        if uf.find(left) == uf.find(right) {
            return Ok(u);
        }
    }
    Ok(1.0)
}

/// Spanning probability at parameter `p` from fresh threshold samples.
pub fn spanning_probability(
    d: usize,
    size: usize,
    p: f64,
    trials: u64,
    stream: &RngStream,
) -> Result<f64> {
    let mut hits = 0u64;
    for trial in 0..trials {
        if spanning_threshold(d, size, &stream.child(trial))? <= p {
            hits += 1;
        }
    }
    Ok(hits as f64 / trials as f64)
}

/// Critical-point estimate from the crossing of spanning curves.
#[derive(Clone, Copy, Debug)]
pub struct PcEstimate {
    pub estimate: f64,
    pub bracket: (f64, f64),
    /// The curves did not separate cleanly at this sample size; the bracket
    /// was widened instead of bisected.
    pub flagged: bool,
}

/// Estimate `p_c(d)` from the crossing point of the spanning-probability
/// curves of the two largest box sizes, bisected to a bracket of width
/// `0.01`. Curves are empirical distribution functions of per-realization
/// spanning thresholds, so no re-sampling is needed while bisecting.
pub fn estimate_pc(
    d: usize,
    box_sizes: &[usize],
    trials: u64,
    stream: &RngStream,
) -> Result<PcEstimate> {
    if box_sizes.len() < 2 {
        return Err(Error::invalid("p_c estimation needs at least 2 box sizes"));
    }
    if trials < 10 {
        return Err(Error::invalid("p_c estimation needs at least 10 trials"));
    }
    let mut sizes = box_sizes.to_vec();
    sizes.sort_unstable();
    let small = sizes[0];
    let large = *sizes.last().unwrap();
    if small == large {
        return Err(Error::invalid("box sizes must be distinct"));
    }

    let thresholds = |size: usize, which: u64| -> Result<Vec<f64>> {
        let sub = stream.child(which);
        let mut ts: Vec<f64> = (0..trials)
            .map(|t| spanning_threshold(d, size, &sub.child(t)))
            .collect::<Result<_>>()?;
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(ts)
    };
    let t_small = thresholds(small, 0)?;
    let t_large = thresholds(large, 1)?;
    let ecdf = |ts: &[f64], p: f64| -> f64 {
        let k = ts.partition_point(|&t| t <= p);
        k as f64 / ts.len() as f64
    };
    let gap = |p: f64| ecdf(&t_large, p) - ecdf(&t_small, p);

    // locate the negative and positive shoulders of the gap curve
    let grid: Vec<f64> = (1..200).map(|i| i as f64 / 200.0).collect();
    let mut lo = grid[0];
    let mut lo_val = 0.0f64;
    let mut hi = *grid.last().unwrap();
    let mut hi_val = 0.0f64;
    for &p in &grid {
        let g = gap(p);
        if g < lo_val {
            lo_val = g;
            lo = p;
        }
        if g > hi_val {
            hi_val = g;
            hi = p;
        }
    }
    let noise = 3.0 * (0.5 / trials as f64).sqrt();
    if lo_val > -noise || hi_val < noise || lo >= hi {
        // curves never separated: report the whole uncertain region
        return Ok(PcEstimate {
            estimate: (lo + hi) / 2.0,
            bracket: (lo.min(hi), hi.max(lo)),
            flagged: true,
        });
    }
    let (mut a, mut b) = (lo, hi);
    while b - a > 0.01 {
        let mid = (a + b) / 2.0;
        if gap(mid) < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(PcEstimate {
        estimate: (a + b) / 2.0,
        bracket: (a, b),
        flagged: false,
    })
}
