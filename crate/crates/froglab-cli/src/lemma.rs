//! The `lemma-checks` battery: quick empirical verification of the analytic
//! ingredients — hitting laws, reach decay, shape growth, cluster density,
//! renormalized block openness and good-vertex bounds.

use froglab_core::brw::reference_brw_boundary;
use froglab_core::frog::{measure_shape_growth, FrogSystemConfig};
use froglab_core::kernel::TransitionKernel;
use froglab_core::lattice::{BoundaryMode, LatticeBox, Point, TargetSet};
use froglab_core::one_dim::{
    chain_step_with_uniform, domination_threshold, dominating_step_with_uniform,
    reach_decay_estimate, OnedModel,
};
use froglab_core::percolation::density_frequency;
use froglab_core::renorm::{good_vertex_probability, renorm_open_probability, RenormScheme};
use froglab_core::rng::RngStream;
use froglab_core::stats::linear_fit;
use froglab_core::walk::{hyperplane_hit_exact, mc_hit_estimate};
use rand::Rng;
use serde::Serialize;

fn scaled(base: u64, scale: f64) -> u64 {
    ((base as f64 * scale) as u64).max(10)
}

#[derive(Serialize)]
pub struct HyperplaneCheck {
    pub alpha: f64,
    pub n: u32,
    pub exact: f64,
    pub estimate: f64,
    pub z: f64,
}

#[derive(Serialize)]
pub struct ScalingCheck {
    pub radius: i64,
    pub estimate: f64,
    pub scaled: f64,
}

#[derive(Serialize)]
pub struct DecayCheck {
    pub model: String,
    pub rate: f64,
    pub r2: f64,
    pub per_n: Vec<f64>,
}

#[derive(Serialize)]
pub struct RenormCheck {
    pub k: u32,
    pub alpha: f64,
    pub open_probability: f64,
    pub stderr: f64,
}

#[derive(Serialize)]
pub struct ChainCheck {
    pub p: f64,
    pub domination_threshold: u64,
    pub coupled_paths: u64,
    pub violations: u64,
}

#[derive(Serialize)]
pub struct LemmaReport {
    pub seed: u64,
    pub hyperplane_law: Vec<HyperplaneCheck>,
    pub hyperplane_max_abs_z: f64,
    pub srw_scaling: Vec<ScalingCheck>,
    pub decay: Vec<DecayCheck>,
    pub shape_exponent: f64,
    pub density_frequency: f64,
    pub renorm_openness: Vec<RenormCheck>,
    pub good_vertex_probability: f64,
    pub chain: Vec<ChainCheck>,
    pub reference_boundary: Vec<(f64, f64)>,
}

pub fn run_lemma_checks(seed: u64, scale: f64) -> LemmaReport {
    let root = RngStream::from_root(seed);

    // hyperplane hitting law in one dimension
    let mut hyperplane_law = Vec::new();
    let mut max_abs_z = 0.0f64;
    for (ai, &alpha) in [0.2, 1.0 / 3.0, 0.6].iter().enumerate() {
        let kernel = TransitionKernel::one_dimensional(alpha).unwrap();
        for n in 1..=6u32 {
            let exact = hyperplane_hit_exact(alpha, n).unwrap();
            let arena =
                LatticeBox::new(vec![-(n as i64) - 1], vec![40], BoundaryMode::Killing).unwrap();
            let trials = scaled(20_000, scale);
            let est = mc_hit_estimate(
                &kernel,
                &[0],
                &TargetSet::hyperplane(-(n as i64)),
                &arena,
                4_000,
                trials,
                &root.child(10).child(ai as u64).child(n as u64),
            )
            .unwrap();
            let se = (exact * (1.0 - exact) / trials as f64).sqrt();
            let z = if se > 0.0 { (est.estimate - exact) / se } else { 0.0 };
            max_abs_z = max_abs_z.max(z.abs());
            hyperplane_law.push(HyperplaneCheck {
                alpha,
                n,
                exact,
                estimate: est.estimate,
                z,
            });
        }
    }

    // transient-dimension hitting scaling: P(0 -> x) * ||x|| bounded below
    let mut srw_scaling = Vec::new();
    let kernel3 = TransitionKernel::symmetric(3);
    for (i, &r) in [2i64, 4, 8].iter().enumerate() {
        let arena = LatticeBox::centered(3, 4 * r.max(8), BoundaryMode::Killing);
        let est = mc_hit_estimate(
            &kernel3,
            &[0, 0, 0],
            &TargetSet::single(vec![r, 0, 0]),
            &arena,
            (64 * arena.diameter()).min(60_000),
            scaled(10_000, scale),
            &root.child(11).child(i as u64),
        )
        .unwrap();
        srw_scaling.push(ScalingCheck {
            radius: r,
            estimate: est.estimate,
            scaled: est.estimate * r as f64,
        });
    }

    // leftward reach decay in both one-dimensional models
    let mut decay = Vec::new();
    for (name, model) in [
        ("drift alpha=0.4", OnedModel::Drift { alpha: 0.4 }),
        ("death s=0.9", OnedModel::Death { survival: 0.9 }),
    ] {
        let est = reach_decay_estimate(model, 8, scaled(20_000, scale), &root.child(12)).unwrap();
        decay.push(DecayCheck {
            model: name.into(),
            rate: est.rate,
            r2: est.r2,
            per_n: est.per_n,
        });
    }

    // planar shape growth exponent
    let shape_exponent = {
        let kernel = TransitionKernel::new(2, 0.5, 0.0).unwrap();
        let horizon = 96u64;
        let arena = LatticeBox::centered(2, horizon as i64 + 1, BoundaryMode::Killing);
        let config = FrogSystemConfig::new(kernel, arena, horizon as usize);
        let growth = measure_shape_growth(&config, horizon, &root.child(13)).unwrap();
        let xs: Vec<f64> = (24..=96).map(|n| (n as f64).ln()).collect();
        let ys: Vec<f64> = (24..=96).map(|n| (growth[n] as f64).ln()).collect();
        linear_fit(&xs, &ys).slope
    };

    // supercritical cluster density along a line segment
    let density = {
        let arena = LatticeBox::centered(2, 24, BoundaryMode::Killing);
        let region: Vec<Point> = (-16..16).map(|y| vec![-12, y]).collect();
        density_frequency(
            2,
            0.8,
            &arena,
            &[0, 0],
            &region,
            0.2,
            scaled(2_000, scale),
            &root.child(14),
        )
        .unwrap()
    };

    // block openness trend in three dimensions
    let mut renorm_openness = Vec::new();
    for k in 1..=3u32 {
        let scheme = RenormScheme::Cube { k };
        let kernel = TransitionKernel::new(3, 0.5, 0.0).unwrap();
        let (p, se) = renorm_open_probability(
            &scheme,
            &kernel,
            1.0,
            &[0, 0, 0],
            scaled(150, scale),
            &root.child(15).child(k as u64),
        )
        .unwrap();
        renorm_openness.push(RenormCheck {
            k,
            alpha: 0.0,
            open_probability: p,
            stderr: se,
        });
    }
    {
        let scheme = RenormScheme::Cube { k: 2 };
        let kernel = TransitionKernel::new(3, 0.5, 0.05).unwrap();
        let (p, se) = renorm_open_probability(
            &scheme,
            &kernel,
            1.0,
            &[0, 0, 0],
            scaled(150, scale),
            &root.child(16),
        )
        .unwrap();
        renorm_openness.push(RenormCheck {
            k: 2,
            alpha: 0.05,
            open_probability: p,
            stderr: se,
        });
    }

    // good-vertex probability at the cube centre
    let good_vertex_probability = good_vertex_probability(
        3,
        0.9,
        0.7,
        &vec![0, 0, 0],
        scaled(5_000, scale),
        &root.child(17),
    )
    .unwrap()
    .0;

    // frontier chain dominated pathwise by the two-thirds chain
    let mut chain = Vec::new();
    for &p in &[0.3, 0.5, 0.7] {
        let k0 = domination_threshold(p).unwrap();
        let paths = scaled(2_000, scale);
        let mut violations = 0u64;
        for path in 0..paths {
            let mut rng = root.child(18).child(path).rng();
            let start = 1 + path % 5;
            let mut y = start;
            let mut dom = start.max(k0);
            for _ in 0..40 {
                let u: f64 = rng.gen();
                y = chain_step_with_uniform(y, p, u);
                dom = dominating_step_with_uniform(dom, p, k0, u).unwrap();
                if dom < y {
                    violations += 1;
                }
                if dom == 0 {
                    break;
                }
            }
        }
        chain.push(ChainCheck {
            p,
            domination_threshold: k0,
            coupled_paths: paths,
            violations,
        });
    }

    let reference_boundary = (0..=10)
        .map(|i| {
            let alpha = i as f64 / 10.0;
            (alpha, reference_brw_boundary(alpha))
        })
        .collect();

    LemmaReport {
        seed,
        hyperplane_law,
        hyperplane_max_abs_z: max_abs_z,
        srw_scaling,
        decay,
        shape_exponent,
        density_frequency: density,
        renorm_openness,
        good_vertex_probability,
        chain,
        reference_boundary,
    }
}

/// Human-readable summary printed after a run.
pub fn summarize(report: &LemmaReport) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "hyperplane law: {} points, max |z| = {:.2}\n",
        report.hyperplane_law.len(),
        report.hyperplane_max_abs_z
    ));
    s.push_str("srw scaling (P * r): ");
    for c in &report.srw_scaling {
        s.push_str(&format!("r={} -> {:.3}  ", c.radius, c.scaled));
    }
    s.push('\n');
    for d in &report.decay {
        s.push_str(&format!(
            "reach decay [{}]: rate {:.3}, R^2 {:.3}\n",
            d.model, d.rate, d.r2
        ));
    }
    s.push_str(&format!(
        "shape growth exponent: {:.2}\n",
        report.shape_exponent
    ));
    s.push_str(&format!(
        "density frequency (p=0.8, a=0.2): {:.3}\n",
        report.density_frequency
    ));
    for r in &report.renorm_openness {
        s.push_str(&format!(
            "block open p(K={}, alpha={}): {:.3} ± {:.3}\n",
            r.k, r.alpha, r.open_probability, r.stderr
        ));
    }
    s.push_str(&format!(
        "good vertex (d=3, s=0.9, a=0.7): {:.3}\n",
        report.good_vertex_probability
    ));
    for c in &report.chain {
        s.push_str(&format!(
            "chain domination p={}: k0={}, {}/{} violations\n",
            c.p, c.domination_threshold, c.violations, c.coupled_paths
        ));
    }
    s
}
