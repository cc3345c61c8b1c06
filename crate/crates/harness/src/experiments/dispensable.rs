//! Dispensable grains and the exact maximum of the filtered configuration,
//! on the configurations of the uniqueness suite.
//!
//! Columns: `grains`, `dispensable`, `boundary_affected`,
//! `dispensable_in_exact`, `heaviest_removed` (components losing their
//! heaviest grain), `exact_equal` (same exact maximum with and without the
//! dispensable grains).

use hardcore_core::dispensable::{remove_dispensable, Dispensability};
use hardcore_core::graph::connected_components;
use hardcore_core::weights::WeightTable;
use hardcore_core::component_max;

use super::uniqueness::subcritical_config;
use super::{all_set, all_zero, timed, Point};
use crate::config::ExperimentConfig;
use crate::output::{Assertion, Layout, Row};

pub const LAYOUT: Layout = Layout {
    params: &[],
    metrics: &[
        "grains",
        "dispensable",
        "boundary_affected",
        "dispensable_in_exact",
        "heaviest_removed",
        "exact_equal",
    ],
};

pub fn run(config: &ExperimentConfig, seed: u64) -> Vec<Point> {
    vec![timed(Vec::new(), || {
        let h = config.weight;
        let (c, _) = subcritical_config(config, seed)?;
        let d = Dispensability::new(&c, h)?;
        let drop = d.dispensable_ids();
        let boundary = drop.iter().filter(|&&k| d.report(k).is_ok_and(|r| r.boundary_affected)).count();
        let exact = component_max(&c, h, config.cap)?;
        let in_exact = exact.kept.iter().filter(|i| drop.binary_search(i).is_ok()).count();
        let weights = WeightTable::new(&c, h);
        let heaviest_removed = connected_components(d.graph())
            .iter()
            .filter(|comp| {
                let top = comp.iter().copied().max_by(|&a, &b| weights.log_weight(a).total_cmp(&weights.log_weight(b)));
                top.is_some_and(|t| drop.binary_search(&t).is_ok())
            })
            .count();
        let (filtered, ids) = remove_dispensable(&c, h)?;
        let again = component_max(&filtered, h, config.cap)?;
        let mapped: Vec<usize> = again.kept.iter().map(|&i| ids[i]).collect();
        Ok(vec![
            c.len().into(),
            drop.len().into(),
            boundary.into(),
            in_exact.into(),
            heaviest_removed.into(),
            (mapped == exact.kept).into(),
        ])
    })]
}

pub fn assess(_config: &ExperimentConfig, layout: &Layout, rows: &[Row]) -> Vec<Assertion> {
    vec![
        all_set("exact_unchanged_by_filter", layout, rows, "exact_equal"),
        all_zero("no_dispensable_in_exact", layout, rows, "dispensable_in_exact"),
        all_zero("heaviest_never_removed", layout, rows, "heaviest_removed"),
    ]
}
