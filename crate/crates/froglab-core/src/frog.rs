//! The frog model engine.
//!
//! One run simulates `FM(d, pi_{w,alpha})` — or its death variant
//! `FM*(d, pi, s)` — inside a finite arena: initially active frogs walk,
//! every visit to a sleeping frog wakes it, and woken frogs walk too. Frogs
//! retire when they leave the arena, exhaust their per-frog step budget, or
//! die (each step independently with probability `1 - s`).
//!
//! Activations are processed through a first-passage priority queue, so each
//! frog's activation time is exactly the earliest time any walker reaches its
//! home. Which frogs wake depends only on reachability, not on processing
//! order, but exact times let the same engine answer time-synchronous
//! questions too: survival of the death variant up to a horizon, and the
//! growth of the visited set per step.
//!
//! Each frog draws from its own random substream keyed by its home
//! coordinates, so trajectories are unchanged by enlarging the arena or the
//! step budget; death draws live on a separate substream so that `s = 1`
//! reproduces the no-death run trajectory for trajectory.

use crate::error::{Error, Result};
use crate::kernel::TransitionKernel;
use crate::lattice::{BoundaryMode, LatticeBox, Point};
use crate::rng::{point_key, RngStream};
use rand::Rng;
use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

/// Sleeping-frog layout of the arena.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Occupancy {
    /// Exactly one sleeping frog at every arena site.
    OnePerSite,
    /// No sleeping frogs anywhere.
    Empty,
}

/// Memory budget for dense arena bookkeeping, in sites.
const MAX_ARENA_SITES: usize = 1 << 26;

// per-site packed state: low 2 bits = status, high 62 bits = earliest
// pending wake time
const SLEEPING: u64 = 0;
const ACTIVE: u64 = 1;
const EMPTY: u64 = 2;
const STATUS_MASK: u64 = 3;
const PENDING_INIT: u64 = !STATUS_MASK;

/// Configuration of one frog model run.
#[derive(Clone, Debug)]
pub struct FrogSystemConfig {
    pub kernel: TransitionKernel,
    /// Per-step survival probability; `1.0` disables death.
    pub survival: f64,
    pub arena: LatticeBox,
    /// Per-frog step budget.
    pub max_steps: usize,
    /// Initially active frogs. Sites may repeat; two frogs on one site is how
    /// the offspring model seeds its pair at the origin.
    pub initial_active: Vec<Point>,
    pub occupancy: Occupancy,
    /// Global clock horizon: clips every walk at time `horizon` and enables
    /// survival and visited-growth reporting.
    pub horizon: Option<u64>,
    /// Populate per-box origin-return flags for boxes `1..=n`.
    pub n_boxes: Option<usize>,
    /// When set, origin visits by frogs homed on the first-axis line are not
    /// counted (the accounting used by the line-based domination).
    pub exclude_axis_line: bool,
    /// Stop waking frogs beyond this many active frogs; the record is
    /// flagged.
    pub activation_cap: Option<usize>,
    pub retain_trajectories: bool,
}

impl FrogSystemConfig {
    /// Standard setup: one sleeping frog per site, one active frog at the
    /// origin, no death.
    pub fn new(kernel: TransitionKernel, arena: LatticeBox, max_steps: usize) -> Self {
        let d = kernel.d();
        FrogSystemConfig {
            kernel,
            survival: 1.0,
            arena,
            max_steps,
            initial_active: vec![vec![0; d]],
            occupancy: Occupancy::OnePerSite,
            horizon: None,
            n_boxes: None,
            exclude_axis_line: false,
            activation_cap: None,
            retain_trajectories: false,
        }
    }

    fn validate(&self) -> Result<usize> {
        if !(0.0..=1.0).contains(&self.survival) {
            return Err(Error::invalid(format!(
                "survival must lie in [0,1], got {}",
                self.survival
            )));
        }
        if self.kernel.d() != self.arena.d() {
            return Err(Error::invalid("kernel and arena dimensions must agree"));
        }
        if self.initial_active.is_empty() {
            return Err(Error::invalid("at least one initially active frog required"));
        }
        for p in &self.initial_active {
            if !self.arena.contains(p) {
                return Err(Error::invalid(format!(
                    "initial active site {p:?} lies outside the arena"
                )));
            }
        }
        let sites = self.arena.site_count()?;
        if sites > MAX_ARENA_SITES {
            return Err(Error::Resource(format!(
                "arena has {sites} sites, budget is {MAX_ARENA_SITES}; shrink the arena"
            )));
        }
        Ok(sites)
    }
}

/// Per-frog summary kept by every run.
#[derive(Clone, Copy, Debug)]
pub struct FrogSummary {
    /// Arena index of the frog's home site.
    pub home_index: usize,
    /// Time at which the frog became active.
    pub activation_time: u64,
    /// Steps the frog actually took before retiring.
    pub steps_taken: u64,
    /// Whether its own trajectory entered the origin.
    pub hit_origin: bool,
}

/// Outcome of one frog model run.
#[derive(Clone, Debug)]
pub struct FrogRunRecord {
    arena: LatticeBox,
    /// Arena indices of activated sites in activation order, initial sites
    /// first.
    pub activated_indices: Vec<usize>,
    /// Number of frogs ever active (counts multiplicity of initial frogs
    /// sharing a site).
    pub active_frog_count: usize,
    pub frogs: Vec<FrogSummary>,
    /// Origin entries by active frogs (initial placement does not count).
    pub origin_visits: u64,
    /// Activated frogs per first-axis coordinate of their home.
    pub per_hyperplane_activated: BTreeMap<i64, u64>,
    /// For each `i <= n`: some frog homed in
    /// `{-i} x [-sqrt(i), sqrt(i)]^{d-1}` was activated and entered the
    /// origin.
    pub box_return_flags: Option<Vec<bool>>,
    /// With a horizon: was some frog active at every time up to it?
    pub survived: Option<bool>,
    /// With a horizon: cumulative count of distinct visited sites per time
    /// step, indices `0..=horizon`.
    pub visited_count_by_time: Option<Vec<u64>>,
    /// Retained trajectories `(home, path)` in activation order.
    pub trajectories: Option<Vec<(Point, Vec<Point>)>>,
    /// The activation cap stopped the run early.
    pub cap_hit: bool,
    /// Some trajectory left the arena.
    pub boundary_touched: bool,
}

impl FrogRunRecord {
    pub fn arena(&self) -> &LatticeBox {
        &self.arena
    }

    pub fn activated_count(&self) -> usize {
        self.activated_indices.len()
    }

    pub fn activated_points(&self) -> Vec<Point> {
        self.activated_indices
            .iter()
            .map(|&i| self.arena.point_at(i))
            .collect()
    }

    pub fn is_activated(&self, p: &[i64]) -> bool {
        match self.arena.index(p) {
            Some(idx) => self.activated_indices.contains(&idx),
            None => false,
        }
    }

    pub fn frog_home(&self, f: &FrogSummary) -> Point {
        self.arena.point_at(f.home_index)
    }

    /// Leftmost first-axis coordinate among activated homes.
    pub fn leftmost_activated(&self) -> Option<i64> {
        self.activated_indices
            .iter()
            .map(|&i| self.arena.point_at(i)[0])
            .min()
    }

    /// Trajectories as a map keyed by home site, for the frog-path relation.
    pub fn trajectory_map(&self) -> Option<BTreeMap<Point, Vec<Point>>> {
        self.trajectories
            .as_ref()
            .map(|ts| ts.iter().cloned().collect())
    }
}

/// Number of completed steps before dying, geometric with per-step survival
/// probability `s`; drawn once per frog, same law as per-step death draws.
pub(crate) fn sample_lifetime<R: Rng + ?Sized>(survival: f64, rng: &mut R) -> u64 {
    if survival <= 0.0 {
        return 0;
    }
    let u = 1.0 - rng.gen::<f64>(); // in (0, 1]
    let l = u.ln() / survival.ln();
    if !l.is_finite() || l >= u64::MAX as f64 {
        u64::MAX
    } else {
        l as u64
    }
}

/// Run the frog model without death.
pub fn run_frog_model(config: &FrogSystemConfig, stream: &RngStream) -> Result<FrogRunRecord> {
    if config.survival != 1.0 {
        return Err(Error::invalid(
            "run_frog_model requires survival = 1; use run_frog_model_with_death",
        ));
    }
    Engine::new(config)?.run(stream)
}

/// Run the frog model with per-step death (survival `s`). `s = 1` is allowed
/// and reproduces the plain model draw for draw.
pub fn run_frog_model_with_death(
    config: &FrogSystemConfig,
    stream: &RngStream,
) -> Result<FrogRunRecord> {
    Engine::new(config)?.run(stream)
}

struct Engine<'a> {
    config: &'a FrogSystemConfig,
    d: usize,
    lo: Vec<i64>,
    hi: Vec<i64>,
    strides: Vec<usize>,
    origin_idx: Option<usize>,
    track_time: bool,
    horizon: u64,
    site_state: Vec<u64>,
    heap: BinaryHeap<Reverse<(u64, usize)>>,
    visited_time: Vec<u64>,
    coverage_end: u64,
    pos: Vec<i64>,
    home_buf: Vec<i64>,
    record: FrogRunRecord,
}

impl<'a> Engine<'a> {
    fn new(config: &'a FrogSystemConfig) -> Result<Self> {
        let n_sites = config.validate()?;
        let arena = &config.arena;
        let d = arena.d();
        let mut strides = vec![1usize; d];
        for axis in (0..d.saturating_sub(1)).rev() {
            strides[axis] = strides[axis + 1] * arena.side(axis + 1);
        }
        let track_time = config.horizon.is_some();
        let record = FrogRunRecord {
            arena: arena.clone(),
            activated_indices: Vec::new(),
            active_frog_count: 0,
            frogs: Vec::new(),
            origin_visits: 0,
            per_hyperplane_activated: BTreeMap::new(),
            box_return_flags: config.n_boxes.map(|n| vec![false; n]),
            survived: None,
            visited_count_by_time: None,
            trajectories: config.retain_trajectories.then(Vec::new),
            cap_hit: false,
            boundary_touched: false,
        };
        Ok(Engine {
            config,
            d,
            lo: arena.lo().to_vec(),
            hi: arena.hi().to_vec(),
            strides,
            origin_idx: arena.index(&vec![0; d]),
            track_time,
            horizon: config.horizon.unwrap_or(u64::MAX),
            site_state: vec![
                PENDING_INIT
                    | match config.occupancy {
                        Occupancy::OnePerSite => SLEEPING,
                        Occupancy::Empty => EMPTY,
                    };
                n_sites
            ],
            heap: BinaryHeap::new(),
            visited_time: if track_time {
                vec![u64::MAX; n_sites]
            } else {
                Vec::new()
            },
            coverage_end: 0,
            pos: vec![0; d],
            home_buf: vec![0; d],
            record,
        })
    }

    #[inline]
    fn index_of(pos: &[i64], lo: &[i64], strides: &[usize]) -> usize {
        let mut idx = 0usize;
        for axis in 0..pos.len() {
            idx += (pos[axis] - lo[axis]) as usize * strides[axis];
        }
        idx
    }

    fn decode(&self, mut idx: usize, out: &mut [i64]) {
        for axis in (0..self.d).rev() {
            let side = (self.hi[axis] - self.lo[axis] + 1) as usize;
            out[axis] = self.lo[axis] + (idx % side) as i64;
            idx /= side;
        }
    }

    fn walk_frog(&mut self, home_idx: usize, t0: u64, frog_stream: RngStream) {
        // decode into a scratch buffer without aliasing self
        let mut home = std::mem::take(&mut self.home_buf);
        self.decode(home_idx, &mut home);

        let mut movement = frog_stream.child(0).rng();
        let mut budget = self.config.max_steps as u64;
        if self.config.survival < 1.0 {
            let mut death = frog_stream.child(1).rng();
            budget = budget.min(sample_lifetime(self.config.survival, &mut death));
        }
        if self.track_time {
            budget = budget.min(self.horizon - t0);
            if self.visited_time[home_idx] > t0 {
                self.visited_time[home_idx] = t0;
            }
        }
        let count_origin =
            !(self.config.exclude_axis_line && home.iter().skip(1).all(|&c| c == 0));
        let retain = self.config.retain_trajectories;
        let mut path = if retain {
            let mut v = Vec::with_capacity((budget.min(1024) + 1) as usize);
            v.push(home.clone());
            v
        } else {
            Vec::new()
        };

        // hot loop: split the borrows and step with an incrementally
        // maintained site index (one coordinate changes per step)
        let Engine {
            config,
            lo,
            hi,
            strides,
            origin_idx,
            track_time,
            site_state,
            heap,
            visited_time,
            record,
            pos,
            ..
        } = self;
        let sampler = config.kernel.sampler();
        let track_time = *track_time;
        let origin = origin_idx.unwrap_or(usize::MAX);
        pos.copy_from_slice(&home);
        let mut site = home_idx;
        let mut steps_taken = budget;
        let mut hit_origin = false;
        let mut k = 0u64;
        while k < budget {
            k += 1;
            let Some(dir) = sampler.sample(&mut movement) else {
                // hold: time passes, position unchanged
                if retain {
                    path.push(pos.clone());
                }
                continue;
            };
            let axis = dir.axis;
            let x_new = if dir.positive {
                pos[axis] + 1
            } else {
                pos[axis] - 1
            };
            if x_new < lo[axis] || x_new > hi[axis] {
                record.boundary_touched = true;
                steps_taken = k;
                break;
            }
            pos[axis] = x_new;
            site = if dir.positive {
                site + strides[axis]
            } else {
                site - strides[axis]
            };
            if retain {
                path.push(pos.clone());
            }
            if site == origin {
                hit_origin = true;
                if count_origin {
                    record.origin_visits += 1;
                }
            }
            let t = t0 + k;
            if track_time && visited_time[site] > t {
                visited_time[site] = t;
            }
            let state = site_state[site];
            if state & STATUS_MASK == SLEEPING && (t << 2) < state {
                site_state[site] = t << 2;
                heap.push(Reverse((t, site)));
            }
        }
        let end = t0 + steps_taken;
        if end > self.coverage_end {
            self.coverage_end = end;
        }
        self.record.frogs.push(FrogSummary {
            home_index: home_idx,
            activation_time: t0,
            steps_taken,
            hit_origin,
        });
        *self
            .record
            .per_hyperplane_activated
            .entry(home[0])
            .or_insert(0) += 1;
        self.record.active_frog_count += 1;
        if let Some(paths) = self.record.trajectories.as_mut() {
            paths.push((home.clone(), path));
        }
        self.home_buf = home;
    }

    fn run(mut self, stream: &RngStream) -> Result<FrogRunRecord> {
        // initial frogs first, in their configured order
        for (j, p) in self.config.initial_active.iter().enumerate() {
            let idx = Self::index_of(p, &self.lo, &self.strides);
            if self.site_state[idx] & STATUS_MASK != ACTIVE {
                self.site_state[idx] = ACTIVE;
                self.record.activated_indices.push(idx);
            }
            self.walk_frog(idx, 0, stream.child(0).child(j as u64));
        }

        // first-passage activation processing
        while let Some(Reverse((t, site))) = self.heap.pop() {
            let state = self.site_state[site];
            if state & STATUS_MASK != SLEEPING || (t << 2) > state {
                continue;
            }
            if t > self.horizon {
                break;
            }
            if let Some(cap) = self.config.activation_cap {
                if self.record.active_frog_count >= cap {
                    self.record.cap_hit = true;
                    break;
                }
            }
            self.site_state[site] = ACTIVE;
            self.record.activated_indices.push(site);
            let mut home = std::mem::take(&mut self.home_buf);
            self.decode(site, &mut home);
            let key = point_key(&home);
            self.home_buf = home;
            self.walk_frog(site, t, stream.child(1).child(key));
        }

        if self.track_time {
            let mut counts = vec![0u64; self.horizon as usize + 1];
            for &t in &self.visited_time {
                if t <= self.horizon {
                    counts[t as usize] += 1;
                }
            }
            let mut acc = 0u64;
            self.record.visited_count_by_time = Some(
                counts
                    .iter()
                    .map(|&c| {
                        acc += c;
                        acc
                    })
                    .collect(),
            );
            self.record.survived = Some(self.coverage_end >= self.horizon);
        }

        if let Some(flags) = self.record.box_return_flags.as_mut() {
            let arena = &self.record.arena;
            for f in &self.record.frogs {
                if !f.hit_origin {
                    continue;
                }
                let home = arena.point_at(f.home_index);
                if home[0] >= 0 {
                    continue;
                }
                let i = (-home[0]) as usize;
                if i == 0 || i > flags.len() {
                    continue;
                }
                let half_width = (i as u64).isqrt() as i64;
                if home.iter().skip(1).all(|&c| c.abs() <= half_width) {
                    flags[i - 1] = true;
                }
            }
        }

        Ok(self.record)
    }
}

/// Debugging dump of retained trajectories, line-delimited: one line per
/// visited position, `frog_id step x1 .. xd`, frogs in activation order.
/// The format is for eyeballs and ad-hoc scripts, not a stable API.
pub fn write_trajectory_dump<W: std::io::Write>(
    record: &FrogRunRecord,
    out: &mut W,
) -> std::io::Result<()> {
    let Some(trajectories) = record.trajectories.as_ref() else {
        return Ok(());
    };
    for (frog_id, (_, path)) in trajectories.iter().enumerate() {
        for (step, p) in path.iter().enumerate() {
            write!(out, "{frog_id} {step}")?;
            for c in p {
                write!(out, " {c}")?;
            }
            writeln!(out)?;
        }
    }
    Ok(())
}

/// The frog-path relation: is there a chain `x -> z_1 -> ... -> z_n -> y`
/// with all intermediate sites in `region`, judged from recorded
/// trajectories? Trajectories of the intermediates need not stay in the
/// region, and `x`, `y` need not belong to it.
pub fn frog_path_exists(
    traces: &BTreeMap<Point, Vec<Point>>,
    x: &Point,
    y: &Point,
    region: &[Point],
) -> Result<bool> {
    if !traces.contains_key(x) {
        return Err(Error::invalid(format!("missing trajectory for start {x:?}")));
    }
    for z in region {
        if !traces.contains_key(z) {
            return Err(Error::invalid(format!("missing trajectory for site {z:?}")));
        }
    }
    let visits = |p: &Point, q: &Point| traces[p].iter().any(|v| v == q);
    let mut frontier = vec![x.clone()];
    let mut reached: Vec<Point> = Vec::new();
    while let Some(cur) = frontier.pop() {
        if visits(&cur, y) {
            return Ok(true);
        }
        for z in region {
            if !reached.contains(z) && visits(&cur, z) {
                reached.push(z.clone());
                frontier.push(z.clone());
            }
        }
    }
    Ok(false)
}

/// A frog cluster: a root and the region sites reachable from it by frog
/// paths within the region.
#[derive(Clone, Debug, PartialEq)]
pub struct FrogCluster {
    pub root: Point,
    pub members: Vec<Point>,
}

/// Compute the frog cluster of `root` in `region` from recorded
/// trajectories; the root is always a member.
pub fn frog_cluster(
    traces: &BTreeMap<Point, Vec<Point>>,
    root: &Point,
    region: &[Point],
) -> Result<FrogCluster> {
    let mut members = vec![root.clone()];
    for target in region {
        if target != root && frog_path_exists(traces, root, target, region)? {
            members.push(target.clone());
        }
    }
    Ok(FrogCluster {
        root: root.clone(),
        members,
    })
}

/// Outcome of one recurrence-proxy run.
#[derive(Clone, Debug)]
pub struct ProxyOutcome {
    /// Fraction of boxes `1..=n_boxes` that contributed a returning frog.
    pub fraction: f64,
    pub flags: Vec<bool>,
}

/// The box-based recurrence proxy: run the model once and report which boxes
/// `B_i = {-i} x [-sqrt(i), sqrt(i)]^{d-1}`, `i <= n_boxes`, hold an
/// activated frog whose trajectory enters the origin. The recurrence
/// mechanism predicts this fraction stays bounded away from zero in the
/// recurrent regime.
pub fn recurrence_proxy(
    config: &FrogSystemConfig,
    n_boxes: usize,
    stream: &RngStream,
) -> Result<ProxyOutcome> {
    if n_boxes == 0 {
        return Err(Error::invalid("n_boxes must be positive"));
    }
    let d = config.arena.d();
    let half = (n_boxes as u64).isqrt() as i64;
    let mut corner_hi = vec![half; d];
    corner_hi[0] = -(n_boxes as i64);
    let mut corner_lo = vec![-half; d];
    corner_lo[0] = -(n_boxes as i64);
    if !config.arena.contains(&corner_hi) || !config.arena.contains(&corner_lo) {
        return Err(Error::invalid(format!(
            "arena too small for {n_boxes} proxy boxes"
        )));
    }
    let mut cfg = config.clone();
    cfg.n_boxes = Some(n_boxes);
    let record = run_frog_model_with_death(&cfg, stream)?;
    let flags = record.box_return_flags.expect("flags requested");
    let fraction = flags.iter().filter(|&&b| b).count() as f64 / n_boxes as f64;
    Ok(ProxyOutcome { fraction, flags })
}

/// Growth of the visited set in the balanced model: `|xi_n|` for
/// `n = 0..=horizon`, the number of distinct sites visited by active frogs
/// by time `n`. Requires a drift-free kernel and an arena the horizon cannot
/// escape.
pub fn measure_shape_growth(
    config: &FrogSystemConfig,
    horizon: u64,
    stream: &RngStream,
) -> Result<Vec<u64>> {
    if config.kernel.alpha() != 0.0 {
        return Err(Error::invalid("shape growth is defined for alpha = 0"));
    }
    for p in &config.initial_active {
        for ((x, lo), hi) in p.iter().zip(config.arena.lo()).zip(config.arena.hi()) {
            let room = (x - lo).min(hi - x);
            if (room as u64) < horizon {
                return Err(Error::invalid(
                    "arena too small: the horizon can reach the boundary",
                ));
            }
        }
    }
    let mut cfg = config.clone();
    cfg.horizon = Some(horizon);
    if cfg.max_steps < horizon as usize {
        cfg.max_steps = horizon as usize;
    }
    let record = run_frog_model_with_death(&cfg, stream)?;
    Ok(record.visited_count_by_time.expect("horizon set"))
}

/// The hyperplane/death coupling: frogs of one hyperplane of
/// `FM(d, pi_{w,alpha})`, killed the moment they leave it, evolve exactly as
/// the drift-free death model `FM*(d-1, pi_sym, 1-w)`. Runs that image model
/// for `horizon` steps; the outcome does not involve `alpha` at all.
pub fn hyperplane_death_coupling(
    d: usize,
    w: f64,
    horizon: u64,
    stream: &RngStream,
) -> Result<FrogRunRecord> {
    if d < 2 {
        return Err(Error::invalid("hyperplane coupling needs d >= 2"));
    }
    if !(0.0..=1.0).contains(&w) {
        return Err(Error::invalid("w must lie in [0,1]"));
    }
    let image_d = d - 1;
    let kernel = TransitionKernel::symmetric(image_d);
    let arena = LatticeBox::centered(image_d, horizon as i64 + 1, BoundaryMode::Killing);
    let mut config = FrogSystemConfig::new(kernel, arena, horizon as usize);
    config.survival = 1.0 - w;
    config.horizon = Some(horizon);
    run_frog_model_with_death(&config, stream)
}
