//! Lower and upper cell constructions over a sweep of Voronoi seed
//! intensities, with the cell-wise surface bound checked per realization.
//!
//! Columns: `seed_intensity`; `grains`, `cells`, `minus_intensity`,
//! `plus_intensity`, `exact_intensity`, `gap` (upper minus lower),
//! `ordered` (lower <= exact <= upper), `violating_cells`,
//! `exact_above_plus_cells`, `cube_holds`, `hard_core_ok`.

use hardcore_core::estimators::h_intensity;
use hardcore_core::graph::build_contact_graph;
use hardcore_core::rng::derive_seed;
use hardcore_core::thinning::{component_max_with, is_hard_core, sandwich_with, Thinning};
use hardcore_core::weights::WeightTable;
use hardcore_core::{sample_voronoi, Tessellation};

use super::{all_set, all_zero, decreasing, sample, steps, timed, torus, Point};
use crate::config::ExperimentConfig;
use crate::output::{Assertion, Layout, Row, Value};

pub const LAYOUT: Layout = Layout {
    params: &["seed_intensity"],
    metrics: &[
        "grains",
        "cells",
        "minus_intensity",
        "plus_intensity",
        "exact_intensity",
        "gap",
        "ordered",
        "violating_cells",
        "exact_above_plus_cells",
        "cube_holds",
        "hard_core_ok",
    ],
};

/// Tessellation for seed intensity `s`; `s = 0` gives one seed at the origin.
pub fn tessellation(config: &ExperimentConfig, s: f64, seed: u64) -> hardcore_core::Result<Tessellation> {
    let window = torus(config, config.side)?;
    if s == 0.0 {
        Tessellation::new(window, vec![[0.0; 3]])
    } else {
        sample_voronoi(window, s, seed)
    }
}

pub fn run(config: &ExperimentConfig, seed: u64) -> Vec<Point> {
    let h = config.weight;
    let base = torus(config, config.side).and_then(|w| sample(config, w, seed));
    let prepared = base.and_then(|c| {
        let graph = build_contact_graph(&c);
        let weights = WeightTable::new(&c, h);
        let exact = component_max_with(&c, &graph, &weights, config.cap)?;
        Ok((c, graph, weights, exact))
    });
    let m = config.m.unwrap_or(config.side / 2.0);
    config
        .seed_intensities
        .iter()
        .enumerate()
        .map(|(j, &s)| {
            timed(vec![Value::from(s)], || {
                let (c, graph, weights, exact) = prepared.as_ref().map_err(Clone::clone)?;
                let tess = tessellation(config, s, derive_seed(seed, "tessellation", j as u64))?;
                let sw = sandwich_with(c, graph, weights, exact, &tess, m, config.cap)?;
                let intensity = |t: &Thinning| h_intensity(t, c, h);
                let (lo, hi, ex) = (intensity(&sw.minus)?, intensity(&sw.plus)?, intensity(exact)?);
                let ordered = weights.compare_totals(&sw.minus.kept, &exact.kept).is_le()
                    && weights.compare_totals(&exact.kept, &sw.plus.kept).is_le();
                Ok(vec![
                    c.len().into(),
                    tess.len().into(),
                    lo.into(),
                    hi.into(),
                    ex.into(),
                    (hi - lo).into(),
                    ordered.into(),
                    sw.report.violations.into(),
                    sw.report.thinning_violations.into(),
                    sw.report.cube.holds.into(),
                    (is_hard_core(c, &sw.minus.kept) && is_hard_core(c, &exact.kept)).into(),
                ])
            })
        })
        .collect()
}

pub fn assess(_config: &ExperimentConfig, layout: &Layout, rows: &[Row]) -> Vec<Assertion> {
    vec![
        all_set("lower_exact_upper_ordered", layout, rows, "ordered"),
        all_zero("cellwise_bound", layout, rows, "violating_cells"),
        all_zero("exact_below_upper_per_cell", layout, rows, "exact_above_plus_cells"),
        all_set("cube_inequality", layout, rows, "cube_holds"),
        all_set("hard_core", layout, rows, "hard_core_ok"),
        decreasing("gap_decreasing", &steps(layout, rows, "gap", true), 2.0),
    ]
}
