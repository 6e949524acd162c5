//! One-dimensional machinery behind the exponential reach-decay bound.
//!
//! In both one-dimensional models that matter here — the drifted model
//! `FM(1, pi_{1,alpha})` and the symmetric death model `FM*(1, pi_sym, s)` —
//! a single frog hits its left neighbour with some probability `p < 1`. The
//! frontier chain tracks, as the reach extends site by site to the left, how
//! many frogs to the right of the frontier could still push it further; it
//! moves as `Binomial(count + 1, p)` and is dominated by a simple chain that
//! drifts down by `-1` with probability `2/3` above a threshold. That
//! domination is what forces `P(0 ~> -n)` to decay exponentially, and this
//! module estimates the decay rate directly from frog model runs.

use crate::error::{Error, Result};
use crate::frog::{run_frog_model_with_death, FrogSystemConfig};
use crate::kernel::TransitionKernel;
use crate::lattice::{BoundaryMode, LatticeBox};
use crate::rng::RngStream;
use crate::stats::{binomial_quantile, linear_fit};
use rand::Rng;

/// The one-dimensional model whose leftward reach is studied.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OnedModel {
    /// `FM(1, pi_{1,alpha})` with rightward drift `alpha > 0`.
    Drift { alpha: f64 },
    /// `FM*(1, pi_sym, s)` with per-step survival `s < 1`.
    Death { survival: f64 },
}

/// Probability that a single frog started at `0` ever hits `-1`.
///
/// Drift: `(1-alpha)/(1+alpha)` by the hyperplane law. Death: the smaller
/// root of the first-step relation `q = s/2 + (s/2) q^2`, which is
/// `(1 - sqrt(1 - s^2)) / s`.
pub fn left_hit_probability_exact(model: OnedModel) -> Result<f64> {
    match model {
        OnedModel::Drift { alpha } => {
            if !(0.0..=1.0).contains(&alpha) {
                return Err(Error::invalid("alpha must lie in [0,1]"));
            }
            if alpha == 0.0 {
                return Err(Error::invalid(
                    "alpha = 0 has left-hit probability 1; the decay bound is vacuous",
                ));
            }
            Ok((1.0 - alpha) / (1.0 + alpha))
        }
        OnedModel::Death { survival } => {
            if !(0.0..=1.0).contains(&survival) {
                return Err(Error::invalid("survival must lie in [0,1]"));
            }
            if survival == 1.0 {
                return Err(Error::invalid(
                    "survival = 1 has left-hit probability 1; the decay bound is vacuous",
                ));
            }
            if survival == 0.0 {
                return Ok(0.0);
            }
            Ok((1.0 - (1.0 - survival * survival).sqrt()) / survival)
        }
    }
}

/// Parameters of the frontier chain: the single-frog left-hit probability
/// and the threshold above which the dominating chain applies.
#[derive(Clone, Copy, Debug)]
pub struct ChainParams {
    pub left_hit_prob: f64,
    pub domination_threshold: u64,
}

impl ChainParams {
    pub fn for_model(model: OnedModel) -> Result<Self> {
        let p = left_hit_probability_exact(model)?;
        Ok(ChainParams {
            left_hit_prob: p,
            domination_threshold: domination_threshold(p)?,
        })
    }
}

/// Smallest `k` with `P(Binomial(k+1, p) <= k-1) > 2/3`; that probability is
/// increasing in `k` for `p < 1`, so the inequality then holds for every
/// larger `k` as well.
pub fn domination_threshold(p: f64) -> Result<u64> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::invalid("p must lie in [0,1)"));
    }
    const CAP: u64 = 1_000_000;
    for k in 1..=CAP {
        // P(Bin(k+1,p) <= k-1) = 1 - p^k ((k+1)(1-p) + p)
        let tail = p.powi(k as i32) * ((k as f64 + 1.0) * (1.0 - p) + p);
        if 1.0 - tail > 2.0 / 3.0 {
            return Ok(k);
        }
    }
    Err(Error::Numerical(format!(
        "no domination threshold below {CAP} for p = {p}"
    )))
}

/// One step of the frontier chain from a known uniform draw; quantile form
/// so that shared uniforms couple it with the dominating chain.
pub fn chain_step_with_uniform(state: u64, p: f64, u: f64) -> u64 {
    if state == 0 {
        0
    } else {
        binomial_quantile(state + 1, p, u)
    }
}

/// One step of the frontier chain: `0` is absorbing, otherwise
/// `Binomial(state + 1, p)`.
pub fn chain_step<R: Rng + ?Sized>(state: u64, p: f64, rng: &mut R) -> u64 {
    chain_step_with_uniform(state, p, rng.gen())
}

/// One step of the dominating chain from a known uniform draw. Valid states
/// are `0` and everything at or above the threshold `k0`.
pub fn dominating_step_with_uniform(state: u64, p: f64, k0: u64, u: f64) -> Result<u64> {
    if state == 0 {
        return Ok(0);
    }
    if state < k0 {
        return Err(Error::invalid(format!(
            "dominating chain is only defined on {{0}} and {{{k0}, {k0}+1, ...}}, got {state}"
        )));
    }
    if state == k0 {
        let drop = (1.0 - p).powi(k0 as i32 + 1);
        Ok(if u < drop { 0 } else { k0 + 1 })
    } else {
        Ok(if u < 2.0 / 3.0 { state - 1 } else { state + 1 })
    }
}

/// One step of the dominating chain: above `k0` it moves down with
/// probability `2/3` and up with `1/3`; at `k0` it drops straight to `0`
/// with probability `(1-p)^(k0+1)` and otherwise moves up.
pub fn dominating_step<R: Rng + ?Sized>(state: u64, p: f64, k0: u64, rng: &mut R) -> Result<u64> {
    dominating_step_with_uniform(state, p, k0, rng.gen())
}

/// Monte Carlo estimates of the leftward reach probabilities `P(0 ~> -n)`
/// for `n = 1..=n_max`, with a log-linear decay fit.
#[derive(Clone, Debug)]
pub struct DecayEstimate {
    /// `P(0 ~> -n)` estimates, index `n - 1`.
    pub per_n: Vec<f64>,
    pub hits: Vec<u64>,
    pub trials: u64,
    /// Fitted decay rate `c` in `P ~ A exp(-c n)`.
    pub rate: f64,
    /// Fitted `log A`.
    pub log_intercept: f64,
    pub r2: f64,
    /// Some estimate hit zero, so the rate is only a lower bound.
    pub lower_bound_only: bool,
}

/// Simulate the one-dimensional model and estimate how fast the leftward
/// reach decays. One run serves every `n` at once: the event `0 ~> -n` is
/// exactly "the leftmost activated site is at or left of `-n`".
///
/// Frogs far to the right contribute only through the exponentially small
/// chance of travelling all the way back, so the arena is truncated a fixed
/// margin to the right; walks are budgeted at `1000 * n_max` steps. Both
/// truncations can only underestimate the reach.
pub fn reach_decay_estimate(
    model: OnedModel,
    n_max: u32,
    trials: u64,
    stream: &RngStream,
) -> Result<DecayEstimate> {
    if n_max < 3 {
        return Err(Error::invalid("n_max must be at least 3"));
    }
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    let (kernel, survival) = match model {
        OnedModel::Drift { alpha } => {
            if !(0.0..=1.0).contains(&alpha) || alpha == 0.0 {
                return Err(Error::invalid("drift model needs alpha in (0,1]"));
            }
            (TransitionKernel::one_dimensional(alpha)?, 1.0)
        }
        OnedModel::Death { survival } => {
            if !(0.0..=1.0).contains(&survival) || survival == 1.0 {
                return Err(Error::invalid("death model needs survival in [0,1)"));
            }
            (TransitionKernel::one_dimensional(0.0)?, survival)
        }
    };
    const RIGHT_MARGIN: i64 = 24;
    let arena = LatticeBox::new(
        vec![-(n_max as i64) - 2],
        vec![RIGHT_MARGIN],
        BoundaryMode::Killing,
    )?;
    let mut config = FrogSystemConfig::new(kernel, arena, 1000 * n_max as usize);
    config.survival = survival;

    let mut hits = vec![0u64; n_max as usize];
    for trial in 0..trials {
        let record = run_frog_model_with_death(&config, &stream.child(trial))?;
        if let Some(leftmost) = record.leftmost_activated() {
            for n in 1..=n_max as usize {
                if leftmost <= -(n as i64) {
                    hits[n - 1] += 1;
                }
            }
        }
    }
    let per_n: Vec<f64> = hits.iter().map(|&h| h as f64 / trials as f64).collect();
    let lower_bound_only = per_n.contains(&0.0);
    let nonzero: Vec<(f64, f64)> = per_n
        .iter()
        .enumerate()
        .take_while(|(_, &p)| p > 0.0)
        .map(|(i, &p)| ((i + 1) as f64, p.ln()))
        .collect();
    let (rate, log_intercept, r2) = if nonzero.len() < 2 {
        (f64::INFINITY, 0.0, 1.0)
    } else {
        let xs: Vec<f64> = nonzero.iter().map(|(x, _)| *x).collect();
        let ys: Vec<f64> = nonzero.iter().map(|(_, y)| *y).collect();
        let fit = linear_fit(&xs, &ys);
        (-fit.slope, fit.intercept, fit.r2)
    };
    Ok(DecayEstimate {
        per_n,
        hits,
        trials,
        rate,
        log_intercept,
        r2,
        lower_bound_only,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats;

    #[test]
    fn exact_left_hit_values() {
        let p = left_hit_probability_exact(OnedModel::Drift { alpha: 1.0 / 3.0 }).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        let q = left_hit_probability_exact(OnedModel::Death { survival: 0.8 }).unwrap();
        assert!((q - 0.5).abs() < 1e-12);
        // first-step relation q = s/2 + (s/2) q^2 holds
        assert!((0.4 + 0.4 * q * q - q).abs() < 1e-12);
        // survival -> 1 pushes q -> 1
        let near = left_hit_probability_exact(OnedModel::Death { survival: 0.999_999 }).unwrap();
        assert!(near > 0.99);
        assert!(left_hit_probability_exact(OnedModel::Drift { alpha: 0.0 }).is_err());
        assert!(left_hit_probability_exact(OnedModel::Death { survival: 1.0 }).is_err());
    }

    #[test]
    fn chain_absorbs_at_zero() {
        let mut rng = RngStream::from_root(1).rng();
        for _ in 0..100 {
            assert_eq!(chain_step(0, 0.5, &mut rng), 0);
        }
    }

    #[test]
    fn chain_with_certain_hit_grows() {
        let mut rng = RngStream::from_root(2).rng();
        for k in 1..6u64 {
            assert_eq!(chain_step(k, 1.0, &mut rng), k + 1);
        }
    }

    #[test]
    fn chain_law_matches_binomial() {
        let mut rng = RngStream::from_root(3).rng();
        let trials = 100_000u64;
        let mut counts = vec![0f64; 4];
        for _ in 0..trials {
            counts[chain_step(2, 0.5, &mut rng) as usize] += 1.0;
        }
        let expected: Vec<f64> = stats::binomial_pmf(3, 0.5)
            .iter()
            .map(|p| p * trials as f64)
            .collect();
        let stat = stats::chi_square_stat(&counts, &expected);
        assert!(
            stat < stats::chi_square_quantile99(3),
            "chi-square {stat} too large"
        );
    }

    #[test]
    fn domination_threshold_matches_pmf_scan() {
        for i in 1..=9 {
            let p = i as f64 / 10.0;
            let k0 = domination_threshold(p).unwrap();
            // independent check using the dense pmf
            let crosses = |k: u64| {
                let pmf = stats::binomial_pmf(k + 1, p);
                let below: f64 = pmf.iter().take(k as usize).sum();
                below > 2.0 / 3.0
            };
            assert!(crosses(k0), "p={p} k0={k0} does not satisfy the inequality");
            for k in 1..k0 {
                assert!(!crosses(k), "p={p} k={k} already satisfies the inequality");
            }
        }
    }

    #[test]
    fn dominating_step_respects_state_space() {
        let mut rng = RngStream::from_root(4).rng();
        assert_eq!(dominating_step(0, 0.5, 3, &mut rng).unwrap(), 0);
        assert!(dominating_step(2, 0.5, 3, &mut rng).is_err());
        // threshold state with p near 1 almost surely moves up
        for _ in 0..50 {
            let next = dominating_step(5, 1.0 - 1e-9, 5, &mut rng).unwrap();
            assert_eq!(next, 6);
        }
    }

    #[test]
    fn coupled_domination_holds_pathwise() {
        let p = 0.5;
        let k0 = domination_threshold(p).unwrap();
        let stream = RngStream::from_root(5);
        for path in 0..2000u64 {
            let mut rng = stream.child(path).rng();
            let start = 1 + (path % 7);
            let mut y = start;
            let mut dom = start.max(k0);
            for _ in 0..60 {
                let u: f64 = rng.gen();
                y = chain_step_with_uniform(y, p, u);
                dom = dominating_step_with_uniform(dom, p, k0, u).unwrap();
                assert!(dom >= y, "path {path}: dominating {dom} fell below {y}");
                if dom == 0 {
                    break;
                }
            }
        }
    }

    #[test]
    fn full_drift_reach_is_zero() {
        let est = reach_decay_estimate(
            OnedModel::Drift { alpha: 1.0 },
            4,
            200,
            &RngStream::from_root(6),
        )
        .unwrap();
        assert!(est.per_n.iter().all(|&p| p == 0.0));
        assert!(est.lower_bound_only);
        assert!(est.rate.is_infinite());
    }

    #[test]
    fn moderate_drift_decays() {
        let est = reach_decay_estimate(
            OnedModel::Drift { alpha: 0.4 },
            6,
            10_000,
            &RngStream::from_root(7),
        )
        .unwrap();
        assert!(est.rate > 0.0, "rate {}", est.rate);
        assert!(est.r2 > 0.9, "r2 {}", est.r2);
        // estimates decrease in n
        assert!(est.per_n.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn death_model_decays() {
        let est = reach_decay_estimate(
            OnedModel::Death { survival: 0.9 },
            6,
            10_000,
            &RngStream::from_root(8),
        )
        .unwrap();
        assert!(est.rate > 0.0);
        assert!(est.r2 > 0.9, "r2 {}", est.r2);
    }
}
