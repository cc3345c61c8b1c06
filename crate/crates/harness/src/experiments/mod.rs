//! The named experiment suites.
//!
//! Each suite fixes its CSV layout, computes the rows of one replicate from
//! the replicate seed alone, and turns the finished table into assertions.

use std::time::Instant;

use hardcore_core::model::Window;
use hardcore_core::rng::derive_seed;
use hardcore_core::{sample_poisson, Configuration};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::output::{groups, Assertion, Layout, MetricSummary, Row, Value};

pub mod dispensable;
pub mod huge_scan;
pub mod isoperimetric;
pub mod matern;
pub mod sandwich;
pub mod shield;
pub mod theta;
pub mod uniqueness;

/// Result of one parameter point of one replicate.
pub struct Point {
    pub params: Vec<Value>,
    pub result: Result<Vec<Value>, String>,
    pub wall_ms: f64,
}

/// Evaluates `f` and records its wall time.
pub fn timed<F>(params: Vec<Value>, f: F) -> Point
where
    F: FnOnce() -> hardcore_core::Result<Vec<Value>>,
{
    let start = Instant::now();
    let result = f().map_err(|e| e.to_string());
    Point { params, result, wall_ms: start.elapsed().as_secs_f64() * 1e3 }
}

pub fn layout(kind: ExperimentKind) -> Layout {
    match kind {
        ExperimentKind::Sandwich => sandwich::LAYOUT,
        ExperimentKind::MaternCheck => matern::LAYOUT,
        ExperimentKind::Uniqueness => uniqueness::LAYOUT,
        ExperimentKind::Dispensable => dispensable::LAYOUT,
        ExperimentKind::ThetaGrid => theta::LAYOUT,
        ExperimentKind::HugeScan => huge_scan::LAYOUT,
        ExperimentKind::Shield => shield::LAYOUT,
        ExperimentKind::Isoperimetric => isoperimetric::LAYOUT,
    }
}

/// Seed of replicate `i`. The uniqueness and dispensable suites share
/// their configurations, and so do the huge-scan and shield suites.
pub fn replicate_seed(config: &ExperimentConfig, i: usize) -> u64 {
    let tag = match config.experiment {
        ExperimentKind::Uniqueness | ExperimentKind::Dispensable => "subcritical",
        ExperimentKind::HugeScan | ExperimentKind::Shield => "huge",
        other => other.name(),
    };
    derive_seed(config.master_seed, tag, i as u64)
}

/// Points of replicate `i`, in a fixed order.
pub fn replicate(config: &ExperimentConfig, i: usize) -> Vec<Row> {
    let seed = replicate_seed(config, i);
    let points = match config.experiment {
        ExperimentKind::Sandwich => sandwich::run(config, seed),
        ExperimentKind::MaternCheck => matern::run(config, seed),
        ExperimentKind::Uniqueness => uniqueness::run(config, seed),
        ExperimentKind::Dispensable => dispensable::run(config, seed),
        ExperimentKind::ThetaGrid => theta::run(config, seed),
        ExperimentKind::HugeScan => huge_scan::run(config, seed),
        ExperimentKind::Shield => shield::run(config, seed),
        ExperimentKind::Isoperimetric => isoperimetric::run(config, seed),
    };
    points
        .into_iter()
        .map(|p| {
            let (metrics, status) = match p.result {
                Ok(m) => (m, "ok".to_string()),
                Err(e) => (Vec::new(), e),
            };
            Row { replicate: i, params: p.params, metrics, seed, status, wall_ms: p.wall_ms }
        })
        .collect()
}

pub fn assess(config: &ExperimentConfig, rows: &[Row]) -> Vec<Assertion> {
    let layout = layout(config.experiment);
    match config.experiment {
        ExperimentKind::Sandwich => sandwich::assess(config, &layout, rows),
        ExperimentKind::MaternCheck => matern::assess(config, &layout, rows),
        ExperimentKind::Uniqueness => uniqueness::assess(config, &layout, rows),
        ExperimentKind::Dispensable => dispensable::assess(config, &layout, rows),
        ExperimentKind::ThetaGrid => theta::assess(config, &layout, rows),
        ExperimentKind::HugeScan => huge_scan::assess(config, &layout, rows),
        ExperimentKind::Shield => shield::assess(config, &layout, rows),
        ExperimentKind::Isoperimetric => isoperimetric::assess(config, &layout, rows),
    }
}

pub fn torus(config: &ExperimentConfig, side: f64) -> hardcore_core::Result<Window> {
    Window::torus(config.dimension, side)
}

pub fn sample(config: &ExperimentConfig, window: Window, seed: u64) -> hardcore_core::Result<Configuration> {
    sample_poisson(config.intensity, config.radius_law(), window, seed)
}

/// Assertion that `metric` is zero (or false) in every successful row.
pub fn all_zero(name: &str, layout: &Layout, rows: &[Row], metric: &str) -> Assertion {
    let bad: Vec<usize> = rows
        .iter()
        .filter(|r| r.metric(layout, metric).is_some_and(|v| v != 0.0))
        .map(|r| r.replicate)
        .collect();
    let mut detail = format!("{} rows with nonzero {metric}", bad.len());
    if !bad.is_empty() {
        let shown: Vec<String> = bad.iter().take(10).map(usize::to_string).collect();
        detail.push_str(&format!("; replicates {}", shown.join(",")));
    }
    Assertion::new(name, bad.is_empty(), detail)
}

/// Assertion that `metric` is nonzero (or true) in every successful row.
pub fn all_set(name: &str, layout: &Layout, rows: &[Row], metric: &str) -> Assertion {
    let bad = rows.iter().filter(|r| r.metric(layout, metric) == Some(0.0)).count();
    Assertion::new(name, bad == 0, format!("{bad} rows with {metric} unset"))
}

/// Change of the mean of `metric` between consecutive parameter points.
#[derive(Debug, Clone)]
pub struct Step {
    pub from: String,
    pub to: String,
    pub from_mean: f64,
    pub to_mean: f64,
    /// Mean of `to - from`.
    pub diff: f64,
    /// Standard error of `diff`.
    pub std_error: f64,
}

/// Consecutive steps over parameter points in table order. With `paired`,
/// differences are taken within each replicate; otherwise the two groups are
/// treated as independent samples.
pub fn steps(layout: &Layout, rows: &[Row], metric: &str, paired: bool) -> Vec<Step> {
    let g = groups(rows);
    let mut out = Vec::new();
    for w in g.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let sa = crate::output::summarize(layout, &a.1, metric);
        let sb = crate::output::summarize(layout, &b.1, metric);
        let (Some(sa), Some(sb)) = (sa, sb) else { continue };
        let (diff, std_error) = if paired {
            let diffs: Vec<f64> = b
                .1
                .iter()
                .filter_map(|rb| {
                    let ra = a.1.iter().find(|r| r.replicate == rb.replicate)?;
                    Some(rb.metric(layout, metric)? - ra.metric(layout, metric)?)
                })
                .collect();
            let s = MetricSummary::of(&diffs).unwrap_or(MetricSummary { n: 0, mean: 0.0, std_error: 0.0, ci95: 0.0 });
            (s.mean, s.std_error)
        } else {
            (sb.mean - sa.mean, sa.std_error.hypot(sb.std_error))
        };
        out.push(Step { from: a.0.clone(), to: b.0.clone(), from_mean: sa.mean, to_mean: sb.mean, diff, std_error });
    }
    out
}

fn describe(steps: &[Step]) -> String {
    steps
        .iter()
        .map(|s| {
            format!(
                "{} -> {}: {:.6} -> {:.6} (diff {:.6}, se {:.6})",
                s.from, s.to, s.from_mean, s.to_mean, s.diff, s.std_error
            )
        })
        .collect::<Vec<_>>()
        .join("; ")
}

/// Means decrease at every step by more than `k` standard errors. A sweep
/// of one point passes vacuously.
pub fn decreasing(name: &str, steps: &[Step], k: f64) -> Assertion {
    let ok = steps.iter().all(|s| s.diff + k * s.std_error < 0.0);
    let detail = if steps.is_empty() { "fewer than two sweep points".to_string() } else { describe(steps) };
    Assertion::new(name, ok, detail)
}

/// No step decreases by more than `k` standard errors.
pub fn non_decreasing(name: &str, steps: &[Step], k: f64) -> Assertion {
    let ok = steps.iter().all(|s| s.diff >= -k * s.std_error);
    Assertion::new(name, ok, describe(steps))
}
