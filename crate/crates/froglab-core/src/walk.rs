//! Trajectory sampling and Monte Carlo hitting estimators for a single
//! walker, plus the exact hyperplane hitting law.
//!
//! Infinite-time hitting events are approximated by a step budget and a
//! truncation box. The hyperplane law `P(0 -> H_{-n}) = ((1-a)/(1+a))^n`
//! bounds the truncation error exponentially: mass escaping a box of radius
//! `R` returns with probability at most `ratio^R`, so modest boxes already
//! push the bias far below Monte Carlo resolution.

use crate::error::{Error, Result};
use crate::kernel::TransitionKernel;
use crate::lattice::{BoundaryMode, LatticeBox, Point, TargetSet};
use crate::rng::RngStream;
use rand::Rng;

/// Default step budget for hitting runs in a box: 64 times the box diameter.
pub fn default_max_steps(arena: &LatticeBox) -> usize {
    64 * arena.diameter()
}

/// Exact hyperplane hitting law: the probability that the drifted walk
/// started at the origin ever reaches `{x : x_1 = -n}`, namely
/// `((1-alpha)/(1+alpha))^n`. Holds for every dimension and axis weight
/// `w > 0`.
pub fn hyperplane_hit_exact(alpha: f64, n: u32) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::invalid(format!("alpha must lie in [0,1], got {alpha}")));
    }
    if n == 0 {
        return Err(Error::invalid("hyperplane distance n must be positive"));
    }
    if alpha == 0.0 {
        return Ok(1.0);
    }
    Ok(((1.0 - alpha) / (1.0 + alpha)).powi(n as i32))
}

/// Sample one trajectory. The walk starts at `start`, takes at most
/// `max_steps` steps (holds count), and respects the box boundary mode:
/// killing truncates the trajectory at the last in-box point, absorbing stops
/// the walk on the first face site it enters. The returned path never
/// contains a point outside the box.
pub fn walk_path<R: Rng + ?Sized>(
    kernel: &TransitionKernel,
    start: &[i64],
    max_steps: usize,
    arena: &LatticeBox,
    rng: &mut R,
) -> Vec<Point> {
    let mut path = Vec::with_capacity(max_steps.min(1024) + 1);
    if !arena.contains(start) {
        return path;
    }
    path.push(start.to_vec());
    if arena.boundary == BoundaryMode::Absorbing && arena.on_face(start) {
        return path;
    }
    let mut pos = start.to_vec();
    for _ in 0..max_steps {
        match kernel.sample_step(rng) {
            Some(dir) => {
                dir.step(&mut pos);
                if !arena.contains(&pos) {
                    // killing exit; absorbing walks already stop on faces
                    break;
                }
                path.push(pos.clone());
                if arena.boundary == BoundaryMode::Absorbing && arena.on_face(&pos) {
                    break;
                }
            }
            None => path.push(pos.clone()),
        }
    }
    path
}

/// Monte Carlo estimate of a hitting probability.
#[derive(Clone, Copy, Debug)]
pub struct HitEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub hits: u64,
    pub trials: u64,
}

/// Estimate the probability that the walk from `start` visits `targets`
/// within `max_steps` steps before being stopped by the box. One trial per
/// child stream, so the estimate is a pure function of `(config, stream)`.
pub fn mc_hit_estimate(
    kernel: &TransitionKernel,
    start: &[i64],
    targets: &TargetSet,
    arena: &LatticeBox,
    max_steps: usize,
    trials: u64,
    stream: &RngStream,
) -> Result<HitEstimate> {
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    if kernel.d() != arena.d() || kernel.d() != start.len() {
        return Err(Error::invalid("kernel, start and box dimensions must agree"));
    }
    let mut hits = 0u64;
    let mut pos = vec![0i64; start.len()];
    for trial in 0..trials {
        let mut rng = stream.child(trial).rng();
        if walk_hits(kernel, start, targets, arena, max_steps, &mut pos, &mut rng) {
            hits += 1;
        }
    }
    let estimate = hits as f64 / trials as f64;
    Ok(HitEstimate {
        estimate,
        stderr: crate::stats::bernoulli_se(estimate, trials),
        hits,
        trials,
    })
}

/// Single-trial hitting indicator; `pos` is scratch space.
fn walk_hits<R: Rng + ?Sized>(
    kernel: &TransitionKernel,
    start: &[i64],
    targets: &TargetSet,
    arena: &LatticeBox,
    max_steps: usize,
    pos: &mut [i64],
    rng: &mut R,
) -> bool {
    if targets.contains(start) {
        return true;
    }
    if !arena.contains(start) {
        return false;
    }
    if arena.boundary == BoundaryMode::Absorbing && arena.on_face(start) {
        return false;
    }
    pos.copy_from_slice(start);
    for _ in 0..max_steps {
        if let Some(dir) = kernel.sample_step(rng) {
            dir.step(pos);
            if !arena.contains(pos) {
                return false;
            }
            if targets.contains(pos) {
                return true;
            }
            if arena.boundary == BoundaryMode::Absorbing && arena.on_face(pos) {
                return false;
            }
        }
    }
    false
}
