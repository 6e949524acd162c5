//! The phase-diagram sweep: per-grid-point recurrence proxy plus transience
//! certificate, classification, deterministic parallel execution, and
//! resumable progress.

use crate::config::SweepConfig;
use froglab_core::brw::{certify_transience, CertifyBudget, Verdict};
use froglab_core::frog::{recurrence_proxy, FrogSystemConfig};
use froglab_core::kernel::TransitionKernel;
use froglab_core::lattice::{BoundaryMode, LatticeBox};
use froglab_core::rng::RngStream;
use froglab_core::stats::mean_ci95;
use froglab_core::brw::reference_brw_boundary;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Mutex;

/// Phase classification of a grid point; a pure function of the two
/// confidence statements, with simultaneous claims surfaced as a conflict
/// rather than silently resolved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    RecurrentLike,
    TransientLike,
    Undetermined,
    Conflict,
}

impl Classification {
    pub fn name(&self) -> &'static str {
        match self {
            Classification::RecurrentLike => "recurrent-like",
            Classification::TransientLike => "transient-like",
            Classification::Undetermined => "undetermined",
            Classification::Conflict => "conflict",
        }
    }

    pub fn from_evidence(proxy_says_recurrent: bool, certificate_says_transient: bool) -> Self {
        match (proxy_says_recurrent, certificate_says_transient) {
            (true, true) => Classification::Conflict,
            (true, false) => Classification::RecurrentLike,
            (false, true) => Classification::TransientLike,
            (false, false) => Classification::Undetermined,
        }
    }
}

/// Everything measured at one `(alpha, w)` grid point.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PhasePointEstimate {
    pub d: usize,
    pub alpha: f64,
    pub w: f64,
    pub proxy_frac: f64,
    pub proxy_ci_low: f64,
    pub proxy_ci_high: f64,
    pub mu_hat: Option<f64>,
    pub mu_ci_low: Option<f64>,
    pub mu_ci_high: Option<f64>,
    pub verdict: String,
    pub classification: Classification,
    pub trials: u64,
    pub seed: u64,
    pub g_alpha: f64,
    /// Failures recorded instead of aborting the sweep.
    pub error: Option<String>,
}

/// Evaluate one grid point. Pure function of `(config, index)`: the proxy
/// and the certificate draw from dedicated substreams of the root seed.
pub fn evaluate_point(config: &SweepConfig, index: usize) -> PhasePointEstimate {
    let (alpha, w) = config.point(index);
    let root = RngStream::from_root(config.seed);
    let proxy_stream = root.child(1).child(index as u64);
    let cert_stream = root.child(2).child(index as u64);

    let mut estimate = PhasePointEstimate {
        d: config.d,
        alpha,
        w,
        proxy_frac: f64::NAN,
        proxy_ci_low: f64::NAN,
        proxy_ci_high: f64::NAN,
        mu_hat: None,
        mu_ci_low: None,
        mu_ci_high: None,
        verdict: Verdict::Inconclusive.name().to_string(),
        classification: Classification::Undetermined,
        trials: config.trials,
        seed: config.seed,
        g_alpha: reference_brw_boundary(alpha),
        error: None,
    };

    let proxy = (|| -> froglab_core::Result<(f64, f64, f64)> {
        let kernel = TransitionKernel::new(config.d, w, alpha)?;
        let arena = LatticeBox::centered(config.d, config.arena_radius, BoundaryMode::Killing);
        let frog_config = FrogSystemConfig::new(kernel, arena, config.max_steps);
        let fractions: Vec<f64> = (0..config.trials)
            .map(|t| {
                recurrence_proxy(&frog_config, config.n_boxes, &proxy_stream.child(t))
                    .map(|o| o.fraction)
            })
            .collect::<froglab_core::Result<_>>()?;
        let ci = mean_ci95(&fractions);
        Ok((ci.mean, ci.lo.max(0.0), ci.hi.min(1.0)))
    })();

    let budget = CertifyBudget {
        xi_trials: config.xi_trials,
        line_trials: config.line_trials,
        decay_trials: config.decay_trials,
        ..CertifyBudget::default()
    };
    let certificate = certify_transience(
        config.d,
        w,
        alpha,
        config.strategy(),
        &budget,
        &cert_stream,
    );

    let mut proxy_recurrent = false;
    match proxy {
        Ok((mean, lo, hi)) => {
            estimate.proxy_frac = mean;
            estimate.proxy_ci_low = lo;
            estimate.proxy_ci_high = hi;
            proxy_recurrent = lo > config.proxy_threshold;
        }
        Err(e) => estimate.error = Some(format!("proxy: {e}")),
    }
    let mut cert_transient = false;
    match certificate {
        Ok(cert) => {
            if let Some(mu) = cert.mu {
                estimate.mu_hat = Some(mu.mu_hat);
                estimate.mu_ci_low = Some(mu.ci_low);
                estimate.mu_ci_high = Some(mu.ci_high);
            }
            estimate.verdict = cert.verdict.name().to_string();
            cert_transient = cert.verdict == Verdict::CertifiedEvidence;
        }
        Err(e) => {
            let msg = format!("certificate: {e}");
            estimate.error = Some(match estimate.error.take() {
                Some(prev) => format!("{prev}; {msg}"),
                None => msg,
            });
        }
    }
    estimate.classification = Classification::from_evidence(proxy_recurrent, cert_transient);
    estimate
}

#[derive(Serialize, Deserialize)]
struct PartialHeader {
    fingerprint: u64,
}

#[derive(Serialize, Deserialize)]
struct PartialLine {
    index: usize,
    point: PhasePointEstimate,
}

/// Run (or resume) a sweep. Completed points are appended to
/// `partial.jsonl` in the output directory as they finish; on resume, lines
/// whose fingerprint matches the configuration are reused verbatim, so an
/// interrupted and a fresh run produce identical results.
pub fn run_sweep(
    config: &SweepConfig,
    out_dir: &Path,
    workers: Option<usize>,
) -> std::io::Result<Vec<PhasePointEstimate>> {
    fs::create_dir_all(out_dir)?;
    let partial_path = out_dir.join("partial.jsonl");
    let fingerprint = config.fingerprint();

    let mut done: Vec<Option<PhasePointEstimate>> = vec![None; config.grid_len()];
    let mut header_ok = false;
    if let Ok(file) = fs::File::open(&partial_path) {
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line?;
            if i == 0 {
                header_ok = serde_json::from_str::<PartialHeader>(&line)
                    .map(|h| h.fingerprint == fingerprint)
                    .unwrap_or(false);
                if !header_ok {
                    break;
                }
                continue;
            }
            if let Ok(entry) = serde_json::from_str::<PartialLine>(&line) {
                if entry.index < done.len() {
                    done[entry.index] = Some(entry.point);
                }
            }
        }
    }
    let mut partial = if header_ok {
        fs::OpenOptions::new().append(true).open(&partial_path)?
    } else {
        let mut f = fs::File::create(&partial_path)?;
        serde_json::to_writer(&mut f, &PartialHeader { fingerprint })?;
        writeln!(f)?;
        done.iter_mut().for_each(|d| *d = None);
        f
    };
    partial.flush()?;

    let pending: Vec<usize> = (0..config.grid_len())
        .filter(|&i| done[i].is_none())
        .collect();

    let sink = Mutex::new(&mut partial);
    let evaluate_and_log = |&index: &usize| {
        let point = evaluate_point(config, index);
        let line = serde_json::to_string(&PartialLine {
            index,
            point: point.clone(),
        })
        .expect("point serializes");
        if let Ok(mut f) = sink.lock() {
            let _ = writeln!(f, "{line}");
            let _ = f.flush();
        }
        (index, point)
    };
    let fresh: Vec<(usize, PhasePointEstimate)> = match workers {
        Some(n) if n > 0 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .expect("worker pool");
            pool.install(|| pending.par_iter().map(evaluate_and_log).collect())
        }
        _ => pending.par_iter().map(evaluate_and_log).collect(),
    };
    for (index, point) in fresh {
        done[index] = Some(point);
    }
    Ok(done.into_iter().map(|p| p.expect("all points done")).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{validate_config, RawSweepConfig};

    fn tiny_config(seed: u64) -> SweepConfig {
        let raw: RawSweepConfig = serde_json::from_str(
            r#"{
                "alpha_grid": [0.05, 1.0],
                "w_grid": [0.5, 0.95],
                "arena_radius": 12,
                "n_boxes": 6,
                "trials": 10,
                "max_steps": 60,
                "certificate": {"xi_trials": 500, "decay_trials": 500}
            }"#,
        )
        .unwrap();
        validate_config(raw, Some(seed)).unwrap()
    }

    #[test]
    fn evaluate_point_is_deterministic() {
        let config = tiny_config(3);
        let a = evaluate_point(&config, 1);
        let b = evaluate_point(&config, 1);
        assert_eq!(a, b);
    }

    #[test]
    fn transient_corner_certifies_in_tiny_sweep() {
        let config = tiny_config(4);
        // index 3 = (alpha = 1.0, w = 0.95)
        let point = evaluate_point(&config, 3);
        assert_eq!(point.classification, Classification::TransientLike);
        assert_eq!(point.g_alpha, 0.5);
    }

    #[test]
    fn sweep_resume_reuses_partial_results() {
        let config = tiny_config(5);
        let dir = tempfile::tempdir().unwrap();
        let full = run_sweep(&config, dir.path(), None).unwrap();
        // simulate an interrupted run: keep only the header and two lines
        let partial_path = dir.path().join("partial.jsonl");
        let content = fs::read_to_string(&partial_path).unwrap();
        let kept: Vec<&str> = content.lines().take(3).collect();
        fs::write(&partial_path, kept.join("\n") + "\n").unwrap();
        let resumed = run_sweep(&config, dir.path(), None).unwrap();
        assert_eq!(full, resumed);
    }

    #[test]
    fn stale_partial_is_discarded() {
        let config = tiny_config(6);
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("partial.jsonl"), "{\"fingerprint\": 1}\n").unwrap();
        let out = run_sweep(&config, dir.path(), None).unwrap();
        assert_eq!(out.len(), 4);
    }
}
