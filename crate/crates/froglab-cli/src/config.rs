//! Sweep configuration: JSON schema, validation, canonical form.

use froglab_core::brw::Strategy;
use serde::{Deserialize, Serialize};

/// Raw configuration as parsed from JSON; optional fields fall back to
/// defaults during validation.
#[derive(Clone, Debug, Deserialize)]
pub struct RawSweepConfig {
    pub d: Option<usize>,
    pub alpha_grid: Option<Vec<f64>>,
    pub w_grid: Option<Vec<f64>>,
    pub arena_radius: Option<i64>,
    pub n_boxes: Option<usize>,
    pub trials: Option<u64>,
    pub max_steps: Option<usize>,
    pub proxy_threshold: Option<f64>,
    pub strategy: Option<String>,
    pub certificate: Option<RawCertificateBudget>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
pub struct RawCertificateBudget {
    pub xi_trials: Option<u64>,
    pub line_trials: Option<u64>,
    pub decay_trials: Option<u64>,
}

/// Validated sweep configuration; serializes to the canonical form.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SweepConfig {
    pub d: usize,
    pub alpha_grid: Vec<f64>,
    pub w_grid: Vec<f64>,
    pub arena_radius: i64,
    pub n_boxes: usize,
    pub trials: u64,
    pub max_steps: usize,
    pub proxy_threshold: f64,
    pub strategy: String,
    pub xi_trials: u64,
    pub line_trials: u64,
    pub decay_trials: u64,
    pub seed: u64,
}

impl SweepConfig {
    pub fn strategy(&self) -> Strategy {
        match self.strategy.as_str() {
            "lines" => Strategy::Lines,
            _ => Strategy::Projected1d,
        }
    }

    pub fn grid_len(&self) -> usize {
        self.alpha_grid.len() * self.w_grid.len()
    }

    pub fn point(&self, index: usize) -> (f64, f64) {
        let w_len = self.w_grid.len();
        (self.alpha_grid[index / w_len], self.w_grid[index % w_len])
    }

    /// Stable fingerprint tying partial results to a configuration.
    pub fn fingerprint(&self) -> u64 {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(0x100_0000_01b3);
        }
        h
    }
}

/// Validate a raw configuration, collecting every violation.
pub fn validate_config(raw: RawSweepConfig, seed_override: Option<u64>) -> Result<SweepConfig, Vec<String>> {
    let mut errors = Vec::new();
    let d = raw.d.unwrap_or(2);
    if d == 0 {
        errors.push("d: dimension must be at least 1".into());
    }
    let alpha_grid = raw.alpha_grid.unwrap_or_default();
    if alpha_grid.is_empty() {
        errors.push("alpha_grid: must contain at least one value".into());
    }
    for (i, a) in alpha_grid.iter().enumerate() {
        if !(0.0..=1.0).contains(a) {
            errors.push(format!("alpha_grid[{i}]: {a} lies outside [0,1]"));
        }
    }
    let w_grid = raw.w_grid.unwrap_or_default();
    if w_grid.is_empty() {
        errors.push("w_grid: must contain at least one value".into());
    }
    for (i, w) in w_grid.iter().enumerate() {
        if !(0.0..=1.0).contains(w) {
            errors.push(format!("w_grid[{i}]: {w} lies outside [0,1]"));
        } else if d == 1 && *w != 1.0 {
            errors.push(format!(
                "w_grid[{i}]: one-dimensional sweeps require w = 1, got {w}"
            ));
        }
    }
    let arena_radius = raw.arena_radius.unwrap_or(100);
    if arena_radius < 1 {
        errors.push("arena_radius: must be at least 1".into());
    }
    let n_boxes = raw.n_boxes.unwrap_or(32);
    if n_boxes == 0 {
        errors.push("n_boxes: must be at least 1".into());
    }
    if arena_radius > 0 && n_boxes as i64 > arena_radius {
        errors.push(format!(
            "n_boxes: {n_boxes} proxy boxes do not fit in arena radius {arena_radius}"
        ));
    }
    let trials = raw.trials.unwrap_or(200);
    if trials == 0 {
        errors.push("trials: must be at least 1".into());
    }
    let max_steps = raw.max_steps.unwrap_or(96);
    if max_steps == 0 {
        errors.push("max_steps: must be at least 1".into());
    }
    let proxy_threshold = raw.proxy_threshold.unwrap_or(0.05);
    if !(0.0..1.0).contains(&proxy_threshold) {
        errors.push(format!(
            "proxy_threshold: {proxy_threshold} lies outside [0,1)"
        ));
    }
    let strategy = raw
        .strategy
        .unwrap_or_else(|| if d == 2 { "projected-1d" } else { "lines" }.into());
    match strategy.as_str() {
        "projected-1d" => {
            if d != 2 {
                errors.push("strategy: projected-1d is a d = 2 construction".into());
            }
        }
        "lines" => {
            if d < 2 {
                errors.push("strategy: lines needs d >= 2".into());
            }
        }
        other => errors.push(format!(
            "strategy: unknown value {other:?} (expected \"projected-1d\" or \"lines\")"
        )),
    }
    let budget = raw.certificate.unwrap_or_default();
    let xi_trials = budget.xi_trials.unwrap_or(20_000);
    let line_trials = budget.line_trials.unwrap_or(1_000);
    let decay_trials = budget.decay_trials.unwrap_or(5_000);
    for (name, v) in [
        ("certificate.xi_trials", xi_trials),
        ("certificate.line_trials", line_trials),
        ("certificate.decay_trials", decay_trials),
    ] {
        if v == 0 {
            errors.push(format!("{name}: must be at least 1"));
        }
    }
    let seed = seed_override.or(raw.seed).unwrap_or(0);

    if errors.is_empty() {
        Ok(SweepConfig {
            d,
            alpha_grid,
            w_grid,
            arena_radius,
            n_boxes,
            trials,
            max_steps,
            proxy_threshold,
            strategy,
            xi_trials,
            line_trials,
            decay_trials,
            seed,
        })
    } else {
        Err(errors)
    }
}
