//! The nearest-neighbour transition law on `Z^d` with drift weight `w` on the
//! first axis, drift strength `alpha` along it, and an optional hold
//! probability for the lazy variant.

use crate::error::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// One of the `2d` lattice directions: `axis` is 0-based, `positive` selects
/// `+e` versus `-e`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Direction {
    pub axis: usize,
    pub positive: bool,
}

impl Direction {
    pub fn new(axis: usize, positive: bool) -> Self {
        Direction { axis, positive }
    }

    /// Parse a signed 1-based axis index: `+1` is `+e1`, `-3` is `-e3`.
    pub fn from_signed(signed_axis: i32) -> Result<Self> {
        if signed_axis == 0 {
            return Err(Error::invalid("signed axis index must be non-zero"));
        }
        Ok(Direction {
            axis: signed_axis.unsigned_abs() as usize - 1,
            positive: signed_axis > 0,
        })
    }

    /// Apply this direction to a point in place.
    #[inline]
    pub fn step(&self, point: &mut [i64]) {
        if self.positive {
            point[self.axis] += 1;
        } else {
            point[self.axis] -= 1;
        }
    }
}

/// Transition law of a single walker.
///
/// The step probabilities are `w(1±alpha)/2` on the first axis and
/// `(1-w-hold)/(2(d-1))` on each remaining direction, plus `hold` for staying
/// put, so they always sum to one. `hold = 0` recovers the plain drifted
/// walk; `w = 1/d, alpha = 0, hold = 0` is the simple random walk.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionKernel {
    d: usize,
    w: f64,
    alpha: f64,
    hold: f64,
}

impl TransitionKernel {
    /// Drifted kernel without laziness.
    pub fn new(d: usize, w: f64, alpha: f64) -> Result<Self> {
        Self::with_hold(d, w, alpha, 0.0)
    }

    /// Full four-parameter kernel.
    pub fn with_hold(d: usize, w: f64, alpha: f64, hold: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::invalid(format!("w must lie in [0,1], got {w}")));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::invalid(format!(
                "alpha must lie in [0,1], got {alpha}"
            )));
        }
        if !(0.0..1.0).contains(&hold) {
            return Err(Error::invalid(format!("hold must lie in [0,1), got {hold}")));
        }
        if w + hold > 1.0 + 1e-12 {
            return Err(Error::invalid(format!(
                "w + hold must not exceed 1, got {}",
                w + hold
            )));
        }
        if d == 1 && (w + hold - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(
                "one-dimensional kernels need all moving weight on the first axis (w + hold = 1)",
            ));
        }
        Ok(TransitionKernel { d, w, alpha, hold })
    }

    /// Simple random walk on `Z^d`.
    pub fn symmetric(d: usize) -> Self {
        TransitionKernel {
            d,
            w: 1.0 / d as f64,
            alpha: 0.0,
            hold: 0.0,
        }
    }

    /// Lazy simple random walk: stay put with probability `hold`, otherwise
    /// step uniformly.
    pub fn lazy_symmetric(d: usize, hold: f64) -> Result<Self> {
        Self::with_hold(d, (1.0 - hold) / d as f64, 0.0, hold)
    }

    /// One-dimensional drifted walk (`w = 1` forced).
    pub fn one_dimensional(alpha: f64) -> Result<Self> {
        Self::new(1, 1.0, alpha)
    }

    pub fn d(&self) -> usize {
        self.d
    }
    pub fn w(&self) -> f64 {
        self.w
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn hold(&self) -> f64 {
        self.hold
    }

    /// Probability of stepping in `dir`. Errors when the axis is out of
    /// range for this dimension.
    pub fn step_probability(&self, dir: Direction) -> Result<f64> {
        if dir.axis >= self.d {
            return Err(Error::invalid(format!(
                "axis {} out of range for dimension {}",
                dir.axis + 1,
                self.d
            )));
        }
        Ok(if dir.axis == 0 {
            if dir.positive {
                self.w * (1.0 + self.alpha) / 2.0
            } else {
                self.w * (1.0 - self.alpha) / 2.0
            }
        } else {
            self.lateral_probability()
        })
    }

    /// Probability of holding (zero unless constructed with a hold weight).
    pub fn hold_probability(&self) -> f64 {
        self.hold
    }

    /// Probability of each single lateral direction.
    fn lateral_probability(&self) -> f64 {
        if self.d == 1 {
            0.0
        } else {
            ((1.0 - self.w - self.hold) / (2.0 * (self.d - 1) as f64)).max(0.0)
        }
    }

    /// Mean displacement of one step along the first axis, `w * alpha`.
    pub fn mean_axis_drift(&self) -> f64 {
        self.w * self.alpha
    }

    /// Draw one step; `None` means the walker holds.
    #[inline]
    pub fn sample_step<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<Direction> {
        self.sampler().sample(rng)
    }

    /// Precompute the sampling thresholds; cheaper when drawing many steps.
    pub fn sampler(&self) -> StepSampler {
        let lateral_total = 1.0 - self.w - self.hold;
        let n_lateral = 2 * (self.d - 1);
        StepSampler {
            p_plus: self.w * (1.0 + self.alpha) / 2.0,
            p_axis: self.w,
            move_total: self.w + lateral_total,
            lateral_scale: if lateral_total > 0.0 {
                n_lateral as f64 / lateral_total
            } else {
                0.0
            },
            n_lateral,
        }
    }
}

/// Cached step-sampling thresholds of a kernel.
#[derive(Clone, Copy, Debug)]
pub struct StepSampler {
    p_plus: f64,
    p_axis: f64,
    move_total: f64,
    lateral_scale: f64,
    n_lateral: usize,
}

impl StepSampler {
    /// Draw one step; `None` means the walker holds.
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<Direction> {
        let u: f64 = rng.gen();
        if u < self.p_plus {
            return Some(Direction::new(0, true));
        }
        if u < self.p_axis {
            return Some(Direction::new(0, false));
        }
        if u < self.move_total {
            let scaled = (u - self.p_axis) * self.lateral_scale;
            let idx = (scaled as usize).min(self.n_lateral - 1);
            // lateral directions enumerated as +e2, -e2, +e3, -e3, ...
            return Some(Direction::new(1 + idx / 2, idx.is_multiple_of(2)));
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    fn total_mass(k: &TransitionKernel) -> f64 {
        let mut sum = k.hold_probability();
        for axis in 0..k.d() {
            for positive in [true, false] {
                sum += k.step_probability(Direction::new(axis, positive)).unwrap();
            }
        }
        sum
    }

    #[test]
    fn eq1_substitution() {
        let k = TransitionKernel::new(2, 0.5, 0.2).unwrap();
        let p = k.step_probability(Direction::from_signed(1).unwrap()).unwrap();
        assert!((p - 0.3).abs() < 1e-15);
    }

    #[test]
    fn symmetric_kernel_is_uniform() {
        let k = TransitionKernel::new(3, 1.0 / 3.0, 0.0).unwrap();
        for axis in 0..3 {
            for positive in [true, false] {
                let p = k.step_probability(Direction::new(axis, positive)).unwrap();
                assert!((p - 1.0 / 6.0).abs() < 1e-15, "axis {axis} p {p}");
            }
        }
    }

    #[test]
    fn degenerate_deterministic_walk() {
        let k = TransitionKernel::new(2, 1.0, 1.0).unwrap();
        assert_eq!(
            k.step_probability(Direction::new(0, true)).unwrap(),
            1.0
        );
        let mut rng = RngStream::from_root(5).rng();
        for _ in 0..50 {
            assert_eq!(k.sample_step(&mut rng), Some(Direction::new(0, true)));
        }
    }

    #[test]
    fn one_dimensional_demands_full_weight() {
        assert!(TransitionKernel::new(1, 0.7, 0.3).is_err());
        assert!(TransitionKernel::one_dimensional(0.3).is_ok());
        // lazy 1d variant: the hold weight absorbs the rest
        assert!(TransitionKernel::with_hold(1, 0.6, 0.0, 0.4).is_ok());
    }

    #[test]
    fn axis_out_of_range_rejected() {
        let k = TransitionKernel::new(2, 0.5, 0.2).unwrap();
        assert!(k.step_probability(Direction::new(2, true)).is_err());
        assert!(Direction::from_signed(0).is_err());
    }

    #[test]
    fn probabilities_sum_to_one_on_grid() {
        for d in [1usize, 2, 3, 4, 7] {
            for wi in 0..5 {
                for ai in 0..5 {
                    for hi in 0..5 {
                        let alpha = ai as f64 / 4.0;
                        let hold = hi as f64 * 0.2;
                        let w = if d == 1 {
                            1.0 - hold
                        } else {
                            (wi as f64 / 4.0).min(1.0 - hold)
                        };
                        let k = TransitionKernel::with_hold(d, w, alpha, hold).unwrap();
                        assert!(
                            (total_mass(&k) - 1.0).abs() < 1e-12,
                            "d={d} w={w} alpha={alpha} hold={hold}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn sampled_frequency_matches_probability() {
        let k = TransitionKernel::new(2, 0.5, 0.2).unwrap();
        let mut rng = RngStream::from_root(11).child(1).rng();
        let trials = 1_000_000u64;
        let mut hits = 0u64;
        for _ in 0..trials {
            if k.sample_step(&mut rng) == Some(Direction::new(0, true)) {
                hits += 1;
            }
        }
        let p_hat = hits as f64 / trials as f64;
        let se = (0.3 * 0.7 / trials as f64).sqrt();
        assert!(
            (p_hat - 0.3).abs() < 4.0 * se,
            "p_hat {p_hat} vs 0.3 (se {se})"
        );
    }

    #[test]
    fn fixed_stream_reproduces_draws() {
        let k = TransitionKernel::new(3, 0.4, 0.6).unwrap();
        let stream = RngStream::from_root(99).child(4);
        let draws = |s: &RngStream| {
            let mut rng = s.rng();
            (0..100).map(|_| k.sample_step(&mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(draws(&stream), draws(&stream));
    }

    #[test]
    fn lazy_kernel_holds() {
        let k = TransitionKernel::lazy_symmetric(2, 0.5).unwrap();
        let mut rng = RngStream::from_root(3).rng();
        let mut holds = 0u64;
        let trials = 200_000u64;
        for _ in 0..trials {
            if k.sample_step(&mut rng).is_none() {
                holds += 1;
            }
        }
        let frac = holds as f64 / trials as f64;
        assert!((frac - 0.5).abs() < 0.01, "hold fraction {frac}");
    }
}
