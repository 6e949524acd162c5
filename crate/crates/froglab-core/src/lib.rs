//! Simulation and numerical certification toolkit for the frog model on `Z^d`
//! with drift.
//!
//! The frog model is an interacting particle system: one active random walker
//! starts at the origin, every other lattice site holds a sleeping walker, and
//! every visit to a sleeping walker wakes it. The walkers here take nearest
//! neighbour steps that put weight `w` on the first axis and drift strength
//! `alpha` along it, so the law of a single step is
//!
//! ```text
//!   P(+e1) = w(1+alpha)/2     P(-e1) = w(1-alpha)/2
//!   P(±ej) = (1-w)/(2(d-1))   for j = 2..d
//! ```
//!
//! Depending on `(alpha, w)` the origin is visited infinitely often
//! (recurrence) or finitely often (transience). This crate provides the
//! machinery to explore that phase structure numerically:
//!
//! * [`kernel`] / [`lattice`] / [`walk`] / [`solver`] — single-walker
//!   primitives: the step law, trajectory sampling, exact hitting-probability
//!   solvers and Monte Carlo hitting estimators.
//! * [`frog`] — the frog model engine itself (with or without per-step
//!   death), activation clusters, recurrence proxies and shape growth.
//! * [`one_dim`] — the one-dimensional frontier chain behind the exponential
//!   reach-decay estimates.
//! * [`percolation`] / [`renorm`] — independent site percolation, spanning
//!   thresholds, and the renormalized block couplings (cube, segment,
//!   good-vertex) that dominate the frog model from below.
//! * [`brw`] — branching random walk dominations and statistical transience
//!   certificates built from the tilted offspring mean.
//!
//! All randomness flows through [`rng::RngStream`], a splittable counter-style
//! stream: identical `(root seed, path)` always reproduces identical runs, and
//! distinct paths are usable as independent, which keeps every estimator pure
//! and safe to fan out across workers.

pub mod brw;
pub mod error;
pub mod frog;
pub mod kernel;
pub mod lattice;
pub mod one_dim;
pub mod percolation;
pub mod renorm;
pub mod rng;
pub mod solver;
pub mod stats;
pub mod walk;

pub use error::{Error, Result};
pub use kernel::{Direction, TransitionKernel};
pub use lattice::{BoundaryMode, LatticeBox, Point};
pub use rng::RngStream;
