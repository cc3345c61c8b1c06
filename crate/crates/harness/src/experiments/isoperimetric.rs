//! Boundary-neighbourhood coefficient of Poisson-Voronoi tessellations over
//! a sweep of seed intensities.
//!
//! Columns: `seed_intensity`; `cells`, `union_fraction` (share of points
//! within sup-distance `m` of a cell boundary), `union_ci95`,
//! `per_cell_upper`. `m` defaults to 1.

use hardcore_core::estimators::isoperimetric_coefficient;
use hardcore_core::rng::derive_seed;

use super::sandwich::tessellation;
use super::{decreasing, steps, timed, Point};
use crate::config::ExperimentConfig;
use crate::output::{Assertion, Layout, Row, Value};

pub const LAYOUT: Layout = Layout {
    params: &["seed_intensity"],
    metrics: &["cells", "union_fraction", "union_ci95", "per_cell_upper"],
};

pub fn run(config: &ExperimentConfig, seed: u64) -> Vec<Point> {
    let m = config.m.unwrap_or(1.0);
    config
        .seed_intensities
        .iter()
        .enumerate()
        .map(|(j, &s)| {
            timed(vec![Value::from(s)], || {
                let tess = tessellation(config, s, derive_seed(seed, "tessellation", j as u64))?;
                let iso = isoperimetric_coefficient(&tess, m, config.samples, derive_seed(seed, "points", j as u64))?;
                Ok(vec![
                    tess.len().into(),
                    iso.union.estimate.into(),
                    iso.union.half_width.into(),
                    iso.per_cell_upper.into(),
                ])
            })
        })
        .collect()
}

pub fn assess(_config: &ExperimentConfig, layout: &Layout, rows: &[Row]) -> Vec<Assertion> {
    vec![decreasing("coefficient_decreasing", &steps(layout, rows, "union_fraction", false), 2.0)]
}
