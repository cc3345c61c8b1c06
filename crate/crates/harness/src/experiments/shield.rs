//! Agreement of two bounded locally maximal thinnings, one improved from the
//! empty set and one from the isolated grains, on grains shielded by good
//! sites. Weights are `h_{a^{2d}}`; the configurations are those of the
//! huge-scan suite.
//!
//! Columns: `a`; `grains`, `good_fraction`, `in_good`, `enclosed`,
//! `violations`, `offending` (disagreement components holding a violation,
//! ids joined by `;`, components by `|`), `converged`, `rounds_empty`,
//! `rounds_matern`, `hard_core_ok`.

use hardcore_core::graph::{build_contact_graph, build_directed_graph};
use hardcore_core::hugegrains::{good_site_grid_with, huge_flags, shield_check, shield_exponent};
use hardcore_core::rng::derive_seed;
use hardcore_core::thinning::{is_hard_core, Source};
use hardcore_core::{local_improve, matern_one, Thinning, WeightSpec};

use super::{all_set, all_zero, sample, timed, torus, Point};
use crate::config::ExperimentConfig;
use crate::output::{Assertion, Layout, Row, Value};

pub const LAYOUT: Layout = Layout {
    params: &["a"],
    metrics: &[
        "grains",
        "good_fraction",
        "in_good",
        "enclosed",
        "violations",
        "offending",
        "converged",
        "rounds_empty",
        "rounds_matern",
        "hard_core_ok",
    ],
};

pub fn run(config: &ExperimentConfig, seed: u64) -> Vec<Point> {
    config
        .a_values
        .iter()
        .map(|&a| {
            timed(vec![Value::from(a)], || {
                let window = torus(config, config.side_factor * f64::from(a))?;
                let c = sample(config, window, derive_seed(seed, "a", u64::from(a)))?;
                let exponent = shield_exponent(a, c.dim());
                let h = WeightSpec::ExpRadius(exponent);
                let huge = huge_flags(&c, &build_contact_graph(&c), exponent)?;
                let grid = good_site_grid_with(&c, &build_directed_graph(&c), &huge, a)?;
                let m = config.m.unwrap_or(3.0 * f64::from(a));
                let t1 = local_improve(&c, &Thinning::new(&c, Vec::new(), Source::Empty), h, m, config.s_max, config.max_rounds)?;
                let t2 = local_improve(&c, &matern_one(&c), h, m, config.s_max, config.max_rounds)?;
                let report = shield_check(&c, &grid, &t1.thinning, &t2.thinning, a)?;
                let offending = report
                    .offending
                    .iter()
                    .map(|comp| comp.iter().map(usize::to_string).collect::<Vec<_>>().join(";"))
                    .collect::<Vec<_>>()
                    .join("|");
                Ok(vec![
                    c.len().into(),
                    grid.good_fraction().into(),
                    report.in_good.into(),
                    report.enclosed.into(),
                    report.violations.len().into(),
                    offending.into(),
                    (t1.converged && t2.converged).into(),
                    t1.rounds.into(),
                    t2.rounds.into(),
                    (is_hard_core(&c, &t1.thinning.kept) && is_hard_core(&c, &t2.thinning.kept)).into(),
                ])
            })
        })
        .collect()
}

pub fn assess(_config: &ExperimentConfig, layout: &Layout, rows: &[Row]) -> Vec<Assertion> {
    let protected: f64 = rows
        .iter()
        .filter_map(|r| Some(r.metric(layout, "in_good")? + r.metric(layout, "enclosed")?))
        .sum();
    let mut v = all_zero("shielded_grains_agree", layout, rows, "violations");
    v.detail.push_str(&format!(" among {protected} shielded grains"));
    vec![
        v,
        all_set("improvement_converged", layout, rows, "converged"),
        all_set("hard_core", layout, rows, "hard_core_ok"),
    ]
}
