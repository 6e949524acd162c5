//! The empirical phase boundary and its monotonicity.
//!
//! For each drift column the boundary is the smallest axis weight classified
//! transient-like. The curve separating the regimes is conjectured to be
//! decreasing in the drift and increasing in the dimension; the report
//! states what the sweep observed, never more.

use crate::sweep::{Classification, PhasePointEstimate};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct AlphaBoundary {
    pub alpha: f64,
    /// Smallest `w` classified transient-like, if any.
    pub boundary_w: Option<f64>,
    pub transient_points: usize,
    pub recurrent_points: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BoundaryReport {
    pub d: usize,
    pub per_alpha: Vec<AlphaBoundary>,
    /// Boundaries never increase as the drift grows (missing boundaries
    /// count as lying above the grid, so they may only appear at the start).
    pub nonincreasing_in_alpha: bool,
    pub conflicts_excluded: usize,
    /// Some points carried errors; the report covers what resolved.
    pub partial: bool,
}

/// Build the boundary report from sweep output. Needs at least three drift
/// columns to say anything about monotonicity.
pub fn boundary_monotonicity_report(
    points: &[PhasePointEstimate],
) -> Result<BoundaryReport, String> {
    if points.is_empty() {
        return Err("no points to report on".into());
    }
    let d = points[0].d;
    let mut alphas: Vec<f64> = points.iter().map(|p| p.alpha).collect();
    alphas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    alphas.dedup();
    if alphas.len() < 3 {
        return Err(format!(
            "monotonicity needs at least 3 drift columns, got {}",
            alphas.len()
        ));
    }
    let mut conflicts = 0usize;
    let mut partial = false;
    let mut per_alpha = Vec::with_capacity(alphas.len());
    for &alpha in &alphas {
        let column: Vec<&PhasePointEstimate> =
            points.iter().filter(|p| p.alpha == alpha).collect();
        let mut boundary: Option<f64> = None;
        let mut transient = 0;
        let mut recurrent = 0;
        for p in &column {
            if p.error.is_some() {
                partial = true;
            }
            match p.classification {
                Classification::TransientLike => {
                    transient += 1;
                    boundary = Some(boundary.map_or(p.w, |b: f64| b.min(p.w)));
                }
                Classification::RecurrentLike => recurrent += 1,
                Classification::Conflict => conflicts += 1,
                Classification::Undetermined => {}
            }
        }
        per_alpha.push(AlphaBoundary {
            alpha,
            boundary_w: boundary,
            transient_points: transient,
            recurrent_points: recurrent,
        });
    }

    // a defined boundary must never be followed (in alpha) by a larger or
    // missing one
    let mut nonincreasing = true;
    let mut last_defined: Option<f64> = None;
    for entry in &per_alpha {
        match (last_defined, entry.boundary_w) {
            (Some(prev), Some(cur)) => {
                if cur > prev {
                    nonincreasing = false;
                }
                last_defined = Some(cur);
            }
            (Some(_), None) => nonincreasing = false,
            (None, cur) => last_defined = cur,
        }
    }

    Ok(BoundaryReport {
        d,
        per_alpha,
        nonincreasing_in_alpha: nonincreasing,
        conflicts_excluded: conflicts,
        partial,
    })
}

/// Pointwise comparison of two boundary reports (conjecturally the boundary
/// rises with the dimension).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DimensionComparison {
    pub d_low: usize,
    pub d_high: usize,
    pub comparable_columns: usize,
    pub higher_dimension_not_below: usize,
}

pub fn compare_dimensions(low: &BoundaryReport, high: &BoundaryReport) -> DimensionComparison {
    let mut comparable = 0;
    let mut not_below = 0;
    for a in &low.per_alpha {
        if let Some(b) = high
            .per_alpha
            .iter()
            .find(|b| (b.alpha - a.alpha).abs() < 1e-12)
        {
            if let (Some(wa), Some(wb)) = (a.boundary_w, b.boundary_w) {
                comparable += 1;
                if wb >= wa {
                    not_below += 1;
                }
            }
        }
    }
    DimensionComparison {
        d_low: low.d,
        d_high: high.d,
        comparable_columns: comparable,
        higher_dimension_not_below: not_below,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(alpha: f64, w: f64, class: Classification) -> PhasePointEstimate {
        PhasePointEstimate {
            d: 2,
            alpha,
            w,
            proxy_frac: 0.0,
            proxy_ci_low: 0.0,
            proxy_ci_high: 0.0,
            mu_hat: None,
            mu_ci_low: None,
            mu_ci_high: None,
            verdict: "inconclusive".into(),
            classification: class,
            trials: 1,
            seed: 0,
            g_alpha: 1.0,
            error: None,
        }
    }

    #[test]
    fn all_transient_grid_has_trivially_monotone_boundary() {
        let mut points = Vec::new();
        for &alpha in &[0.1, 0.5, 0.9] {
            for &w in &[0.2, 0.6] {
                points.push(point(alpha, w, Classification::TransientLike));
            }
        }
        let report = boundary_monotonicity_report(&points).unwrap();
        assert!(report.nonincreasing_in_alpha);
        assert!(report
            .per_alpha
            .iter()
            .all(|a| a.boundary_w == Some(0.2)));
    }

    #[test]
    fn decreasing_boundary_detected() {
        let mut points = Vec::new();
        let boundaries = [(0.1, 0.9), (0.5, 0.6), (0.9, 0.3)];
        for &(alpha, b) in &boundaries {
            for &w in &[0.3, 0.6, 0.9] {
                let class = if w >= b {
                    Classification::TransientLike
                } else {
                    Classification::RecurrentLike
                };
                points.push(point(alpha, w, class));
            }
        }
        let report = boundary_monotonicity_report(&points).unwrap();
        assert!(report.nonincreasing_in_alpha);
        let bs: Vec<Option<f64>> = report.per_alpha.iter().map(|a| a.boundary_w).collect();
        assert_eq!(bs, vec![Some(0.9), Some(0.6), Some(0.3)]);
    }

    #[test]
    fn increasing_boundary_flagged() {
        let mut points = vec![
            point(0.1, 0.3, Classification::TransientLike),
            point(0.5, 0.6, Classification::TransientLike),
            point(0.9, 0.9, Classification::TransientLike),
        ];
        points.push(point(0.1, 0.9, Classification::TransientLike));
        let report = boundary_monotonicity_report(&points).unwrap();
        assert!(!report.nonincreasing_in_alpha);
    }

    #[test]
    fn conflicts_are_counted_and_excluded() {
        let points = vec![
            point(0.1, 0.5, Classification::Conflict),
            point(0.5, 0.5, Classification::Undetermined),
            point(0.9, 0.5, Classification::TransientLike),
        ];
        let report = boundary_monotonicity_report(&points).unwrap();
        assert_eq!(report.conflicts_excluded, 1);
        assert_eq!(report.per_alpha[0].boundary_w, None);
        assert!(report.nonincreasing_in_alpha);
    }

    #[test]
    fn too_few_columns_rejected() {
        let points = vec![
            point(0.1, 0.5, Classification::Undetermined),
            point(0.9, 0.5, Classification::Undetermined),
        ];
        assert!(boundary_monotonicity_report(&points).is_err());
    }

    #[test]
    fn dimension_comparison_counts_columns() {
        let low = boundary_monotonicity_report(&[
            point(0.1, 0.9, Classification::TransientLike),
            point(0.5, 0.6, Classification::TransientLike),
            point(0.9, 0.3, Classification::TransientLike),
        ])
        .unwrap();
        let mut high_points = vec![
            point(0.1, 0.9, Classification::TransientLike),
            point(0.5, 0.8, Classification::TransientLike),
            point(0.9, 0.5, Classification::TransientLike),
        ];
        high_points.iter_mut().for_each(|p| p.d = 3);
        let high = boundary_monotonicity_report(&high_points).unwrap();
        let cmp = compare_dimensions(&low, &high);
        assert_eq!(cmp.comparable_columns, 3);
        assert_eq!(cmp.higher_dimension_not_below, 3);
        assert_eq!((cmp.d_low, cmp.d_high), (2, 3));
    }
}
