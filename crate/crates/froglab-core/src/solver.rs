//! Exact first-step solver for hitting probabilities in a finite box.
//!
//! For every box site `s` the hitting probability `h(s)` of the target set
//! before being stopped by the boundary satisfies the first-step linear
//! system
//!
//! ```text
//!   h(s) = hold * h(s) + sum_dir p(dir) * v(s + dir)
//! ```
//!
//! with `v = 1` on targets, `v = 0` outside the box (killing) or on
//! non-target faces (absorbing), and `v = h` elsewhere. Small systems are
//! solved by dense Gaussian elimination, larger ones by Gauss–Seidel sweeps
//! in lexicographic order. Both routes are deterministic.

use crate::error::{Error, Result};
use crate::kernel::{Direction, TransitionKernel};
use crate::lattice::{BoundaryMode, LatticeBox, TargetSet};

/// Above this state count the dense elimination is replaced by Gauss–Seidel.
/// Kept well below the point where cubic cost becomes noticeable.
const DENSE_LIMIT: usize = 2048;
const GS_TOL: f64 = 1e-10;
const GS_MAX_SWEEPS: usize = 100_000;

/// Probability that the walk started at `start` reaches `targets` before the
/// box stops it, solved exactly (to solver tolerance `1e-10`).
pub fn exact_hit_solver(
    kernel: &TransitionKernel,
    start: &[i64],
    targets: &TargetSet,
    arena: &LatticeBox,
) -> Result<f64> {
    exact_hit_solver_with_limit(kernel, start, targets, arena, DENSE_LIMIT)
}

fn exact_hit_solver_with_limit(
    kernel: &TransitionKernel,
    start: &[i64],
    targets: &TargetSet,
    arena: &LatticeBox,
    dense_limit: usize,
) -> Result<f64> {
    if kernel.d() != arena.d() || start.len() != arena.d() {
        return Err(Error::invalid("kernel, start and box dimensions must agree"));
    }
    if !arena.contains(start) {
        return Err(Error::invalid("start must lie inside the box"));
    }
    if targets.contains(start) {
        return Ok(1.0);
    }
    let n = arena.site_count()?;

    // terminal values: Some(v) for absorbing states, None for free states
    let mut terminal: Vec<Option<f64>> = vec![None; n];
    let mut free_index = vec![usize::MAX; n];
    let mut free_sites = Vec::new();
    for idx in 0..n {
        let p = arena.point_at(idx);
        if targets.contains(&p) {
            terminal[idx] = Some(1.0);
        } else if arena.boundary == BoundaryMode::Absorbing && arena.on_face(&p) {
            terminal[idx] = Some(0.0);
        } else {
            free_index[idx] = free_sites.len();
            free_sites.push(idx);
        }
    }

    let n_free = free_sites.len();
    if n_free == 0 {
        return Ok(0.0);
    }

    // per-free-site neighbour couplings and constant term
    let diag = 1.0 - kernel.hold_probability();
    let mut couplings: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n_free];
    let mut constant = vec![0.0; n_free];
    let mut neighbour = vec![0i64; arena.d()];
    for (row, &site) in free_sites.iter().enumerate() {
        let p = arena.point_at(site);
        for axis in 0..arena.d() {
            for positive in [true, false] {
                let prob = kernel
                    .step_probability(Direction::new(axis, positive))
                    .expect("axis in range");
                if prob == 0.0 {
                    continue;
                }
                neighbour.copy_from_slice(&p);
                if positive {
                    neighbour[axis] += 1;
                } else {
                    neighbour[axis] -= 1;
                }
                match arena.index(&neighbour) {
                    None => {} // killed outside
                    Some(nidx) => match terminal[nidx] {
                        Some(v) => constant[row] += prob * v,
                        None => couplings[row].push((free_index[nidx], prob)),
                    },
                }
            }
        }
    }

    let solution = if n_free <= dense_limit {
        solve_dense(n_free, diag, &couplings, &constant)?
    } else {
        solve_gauss_seidel(n_free, diag, &couplings, &constant)?
    };

    let start_idx = arena.index(start).expect("start inside box");
    Ok(solution[free_index[start_idx]].clamp(0.0, 1.0))
}

/// Dense Gaussian elimination with partial pivoting. A vanishing pivot means
/// the state cannot reach any absorption, so its hitting probability is
/// reported as zero rather than failing.
fn solve_dense(
    n: usize,
    diag: f64,
    couplings: &[Vec<(usize, f64)>],
    constant: &[f64],
) -> Result<Vec<f64>> {
    let mut a = vec![0.0f64; n * n];
    let mut b = constant.to_vec();
    for row in 0..n {
        a[row * n + row] = diag;
        for &(col, prob) in &couplings[row] {
            a[row * n + col] -= prob;
        }
    }
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_val = a[col * n + col].abs();
        for row in col + 1..n {
            let v = a[row * n + col].abs();
            if v > pivot_val {
                pivot_val = v;
                pivot_row = row;
            }
        }
        if pivot_val < 1e-300 {
            // degenerate state: pin it to zero and continue
            a[col * n + col] = 1.0;
            b[col] = 0.0;
            continue;
        }
        if pivot_row != col {
            for k in 0..n {
                a.swap(col * n + k, pivot_row * n + k);
            }
            b.swap(col, pivot_row);
        }
        let pivot = a[col * n + col];
        for row in col + 1..n {
            let factor = a[row * n + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            a[row * n + col] = 0.0;
            for k in col + 1..n {
                a[row * n + k] -= factor * a[col * n + k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row * n + k] * x[k];
        }
        x[row] = acc / a[row * n + row];
    }
    Ok(x)
}

/// Gauss–Seidel sweeps in lexicographic site order.
fn solve_gauss_seidel(
    n: usize,
    diag: f64,
    couplings: &[Vec<(usize, f64)>],
    constant: &[f64],
) -> Result<Vec<f64>> {
    let mut x = vec![0.0f64; n];
    for _ in 0..GS_MAX_SWEEPS {
        let mut max_delta = 0.0f64;
        for row in 0..n {
            let mut acc = constant[row];
            for &(col, prob) in &couplings[row] {
                acc += prob * x[col];
            }
            let new = acc / diag;
            let delta = (new - x[row]).abs();
            if delta > max_delta {
                max_delta = delta;
            }
            x[row] = new;
        }
        if max_delta < GS_TOL {
            return Ok(x);
        }
    }
    Err(Error::Numerical(format!(
        "Gauss-Seidel did not reach {GS_TOL} within {GS_MAX_SWEEPS} sweeps"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::BoundaryMode;

    #[test]
    fn gamblers_ruin_symmetric() {
        // SRW on {0..10}, absorbing at both ends, ruin probability 1 - k/10
        let kernel = TransitionKernel::one_dimensional(0.0).unwrap();
        let arena = LatticeBox::new(vec![0], vec![10], BoundaryMode::Absorbing).unwrap();
        let targets = TargetSet::single(vec![0]);
        let p = exact_hit_solver(&kernel, &[1], &targets, &arena).unwrap();
        assert!((p - 0.9).abs() < 1e-9, "p = {p}");
        let p5 = exact_hit_solver(&kernel, &[5], &targets, &arena).unwrap();
        assert!((p5 - 0.5).abs() < 1e-9);
    }

    #[test]
    fn gamblers_ruin_biased_closed_form() {
        // up-probability p = (1+alpha)/2; hit 0 before N from k has probability
        // (r^k - r^N) / (1 - r^N) with r = q/p
        let alpha = 0.3;
        let kernel = TransitionKernel::one_dimensional(alpha).unwrap();
        let n = 12i64;
        let arena = LatticeBox::new(vec![0], vec![n], BoundaryMode::Absorbing).unwrap();
        let targets = TargetSet::single(vec![0]);
        let r = (1.0 - alpha) / (1.0 + alpha);
        for k in 1..n {
            let got = exact_hit_solver(&kernel, &[k], &targets, &arena).unwrap();
            let want = (r.powi(k as i32) - r.powi(n as i32)) / (1.0 - r.powi(n as i32));
            assert!((got - want).abs() < 1e-9, "k={k} got {got} want {want}");
        }
    }

    #[test]
    fn deterministic_drift_hits() {
        let kernel = TransitionKernel::one_dimensional(1.0).unwrap();
        let arena = LatticeBox::centered(1, 5, BoundaryMode::Killing);
        let targets = TargetSet::single(vec![0]);
        let p = exact_hit_solver(&kernel, &[-1], &targets, &arena).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn start_in_targets() {
        let kernel = TransitionKernel::symmetric(2);
        let arena = LatticeBox::centered(2, 3, BoundaryMode::Killing);
        let targets = TargetSet::single(vec![1, 1]);
        assert_eq!(
            exact_hit_solver(&kernel, &[1, 1], &targets, &arena).unwrap(),
            1.0
        );
    }

    #[test]
    fn unreachable_target_reports_zero() {
        // alpha = 1 walks only right; a target to the left is unreachable
        let kernel = TransitionKernel::one_dimensional(1.0).unwrap();
        let arena = LatticeBox::centered(1, 5, BoundaryMode::Killing);
        let targets = TargetSet::single(vec![-2]);
        let p = exact_hit_solver(&kernel, &[0], &targets, &arena).unwrap();
        assert!(p.abs() < 1e-12);
    }

    #[test]
    fn dense_and_gauss_seidel_agree() {
        let kernel = TransitionKernel::new(2, 0.6, 0.3).unwrap();
        let arena = LatticeBox::centered(2, 6, BoundaryMode::Killing);
        let targets = TargetSet::single(vec![0, 0]);
        let dense =
            exact_hit_solver_with_limit(&kernel, &[-3, 1], &targets, &arena, usize::MAX).unwrap();
        let gs = exact_hit_solver_with_limit(&kernel, &[-3, 1], &targets, &arena, 0).unwrap();
        assert!((dense - gs).abs() < 1e-8, "dense {dense} gs {gs}");
    }

    #[test]
    fn hold_weight_does_not_change_hitting_probability() {
        // laziness rescales time, not the embedded jump chain
        let plain = TransitionKernel::new(2, 0.5, 0.2).unwrap();
        let lazy = TransitionKernel::with_hold(2, 0.25, 0.2, 0.5).unwrap();
        let arena = LatticeBox::centered(2, 5, BoundaryMode::Killing);
        let targets = TargetSet::single(vec![2, -1]);
        let a = exact_hit_solver(&plain, &[0, 0], &targets, &arena).unwrap();
        let b = exact_hit_solver(&lazy, &[0, 0], &targets, &arena).unwrap();
        assert!((a - b).abs() < 1e-9, "plain {a} lazy {b}");
    }
}
