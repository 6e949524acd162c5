//! Result persistence: CSV and JSON emission with atomic writes.

use crate::config::SweepConfig;
use crate::report::BoundaryReport;
use crate::sweep::PhasePointEstimate;
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::Write;
use std::path::Path;

pub const CSV_HEADER: &str = "d,alpha,w,proxy_frac,proxy_ci_low,proxy_ci_high,mu_hat,mu_ci_low,mu_ci_high,verdict,classification,trials,seed,g_alpha";

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

/// Render the grid as CSV (exact column set, shortest-round-trip floats).
pub fn render_csv(points: &[PhasePointEstimate]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            p.d,
            p.alpha,
            p.w,
            p.proxy_frac,
            p.proxy_ci_low,
            p.proxy_ci_high,
            fmt_opt(p.mu_hat),
            fmt_opt(p.mu_ci_low),
            fmt_opt(p.mu_ci_high),
            p.verdict,
            p.classification.name(),
            p.trials,
            p.seed,
            p.g_alpha,
        ));
    }
    out
}

/// JSON document mirroring the CSV fields plus run metadata.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SweepOutput {
    pub config: SweepConfig,
    /// Decision conventions surfaced with the data: the proxy threshold and
    /// the confidence level behind every interval.
    pub proxy_threshold: f64,
    pub confidence_level: f64,
    pub points: Vec<PhasePointEstimate>,
}

impl SweepOutput {
    pub fn new(config: SweepConfig, points: Vec<PhasePointEstimate>) -> Self {
        SweepOutput {
            proxy_threshold: config.proxy_threshold,
            confidence_level: 0.95,
            config,
            points,
        }
    }
}

/// Write bytes atomically: a temporary file in the target directory is
/// renamed over the destination, and removed if anything fails.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

pub fn write_csv(points: &[PhasePointEstimate], path: &Path) -> std::io::Result<()> {
    write_atomic(path, render_csv(points).as_bytes())
}

pub fn write_json(output: &SweepOutput, path: &Path) -> std::io::Result<()> {
    let mut bytes = serde_json::to_vec_pretty(output)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

pub fn write_report(report: &BoundaryReport, path: &Path) -> std::io::Result<()> {
    let mut bytes = serde_json::to_vec_pretty(report)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

pub fn load_json(path: &Path) -> std::io::Result<SweepOutput> {
    let bytes = fs::read(path)?;
    serde_json::from_slice(&bytes).map_err(std::io::Error::other)
}
