//! Huge grains near the origin and good lattice sites over a sweep of `a`,
//! each on a torus of side `side_factor * a`.
//!
//! Columns: `a`; `grains`, `origin_grains`, `huge_fraction` (empty when no
//! grain is centered in the origin cube), `sites`, `good_sites`,
//! `good_fraction`.

use hardcore_core::graph::{build_contact_graph, build_directed_graph};
use hardcore_core::hugegrains::{good_site_grid_with, huge_flags, huge_fraction_with, shield_exponent};

use super::{non_decreasing, sample, steps, timed, torus, Point};
use crate::config::ExperimentConfig;
use crate::output::{Assertion, Layout, Row, Value};
use hardcore_core::rng::derive_seed;

pub const LAYOUT: Layout = Layout {
    params: &["a"],
    metrics: &["grains", "origin_grains", "huge_fraction", "sites", "good_sites", "good_fraction"],
};

pub fn run(config: &ExperimentConfig, seed: u64) -> Vec<Point> {
    config
        .a_values
        .iter()
        .map(|&a| {
            timed(vec![Value::from(a)], || {
                let window = torus(config, config.side_factor * f64::from(a))?;
                let c = sample(config, window, derive_seed(seed, "a", u64::from(a)))?;
                let huge = huge_flags(&c, &build_contact_graph(&c), shield_exponent(a, c.dim()))?;
                let (fraction, inside) = huge_fraction_with(&c, &huge, a);
                let grid = good_site_grid_with(&c, &build_directed_graph(&c), &huge, a)?;
                Ok(vec![
                    c.len().into(),
                    inside.into(),
                    fraction.into(),
                    grid.site_count().into(),
                    grid.good_count().into(),
                    grid.good_fraction().into(),
                ])
            })
        })
        .collect()
}

pub fn assess(_config: &ExperimentConfig, layout: &Layout, rows: &[Row]) -> Vec<Assertion> {
    vec![
        non_decreasing("huge_fraction_non_decreasing", &steps(layout, rows, "huge_fraction", false), 2.0),
        non_decreasing("good_fraction_non_decreasing", &steps(layout, rows, "good_fraction", false), 2.0),
    ]
}
