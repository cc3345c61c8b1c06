//! Local improvement from three starts against the exact per-component
//! maximum, on configurations whose components stay small.
//!
//! Columns: `grains`, `attempts` (draws until every component had at most
//! `max_component` grains), `largest_component`, `oracle_components`,
//! `oracle_mismatches` (exact solver against subset enumeration),
//! `exact_locally_maximal`, then `equal_*`, `converged_*`, `rounds_*` for the
//! starts `empty`, `matern` and `random`, and `hard_core_ok`.

use hardcore_core::graph::{build_contact_graph, connected_components};
use hardcore_core::rng::derive_seed;
use hardcore_core::thinning::{is_hard_core, random_maximal, Source};
use hardcore_core::{
    brute_force, component_max, is_locally_maximal, local_improve, matern_one, solve_exact, Configuration, Error,
    Thinning,
};

use super::{all_set, all_zero, sample, timed, torus, Point};
use crate::config::ExperimentConfig;
use crate::output::{Assertion, Layout, Row, Value};

pub const LAYOUT: Layout = Layout {
    params: &[],
    metrics: &[
        "grains",
        "attempts",
        "largest_component",
        "oracle_components",
        "oracle_mismatches",
        "exact_locally_maximal",
        "equal_empty",
        "converged_empty",
        "rounds_empty",
        "equal_matern",
        "converged_matern",
        "rounds_matern",
        "equal_random",
        "converged_random",
        "rounds_random",
        "hard_core_ok",
    ],
};

const MAX_ATTEMPTS: u64 = 1000;
/// Largest component compared against subset enumeration.
const ORACLE_LIMIT: usize = 15;

/// First draw whose components all have at most `max_component` grains,
/// with the number of draws used.
pub fn subcritical_config(config: &ExperimentConfig, seed: u64) -> hardcore_core::Result<(Configuration, u64)> {
    let window = torus(config, config.side)?;
    for attempt in 0..MAX_ATTEMPTS {
        let s = if attempt == 0 { seed } else { derive_seed(seed, "redraw", attempt) };
        let c = sample(config, window, s)?;
        let largest = connected_components(&build_contact_graph(&c)).iter().map(Vec::len).max().unwrap_or(0);
        if largest <= config.max_component {
            return Ok((c, attempt + 1));
        }
    }
    Err(Error::ComponentTooLarge { size: config.max_component + 1, cap: config.max_component })
}

/// Cube side of the swap search; defaults to twice the torus side, which
/// places every grain in every cube.
pub fn cube_side(config: &ExperimentConfig) -> f64 {
    config.m.unwrap_or(2.0 * config.side)
}

pub fn run(config: &ExperimentConfig, seed: u64) -> Vec<Point> {
    vec![timed(Vec::new(), || {
        let h = config.weight;
        let (c, attempts) = subcritical_config(config, seed)?;
        let comps = connected_components(&build_contact_graph(&c));
        let largest = comps.iter().map(Vec::len).max().unwrap_or(0);
        let mut checked = 0usize;
        let mut mismatches = 0usize;
        for comp in comps.iter().filter(|k| k.len() <= ORACLE_LIMIT) {
            checked += 1;
            if solve_exact(comp, &c, h, config.cap)?.chosen != brute_force(comp, &c, h)?.chosen {
                mismatches += 1;
            }
        }
        let exact = component_max(&c, h, config.cap)?;
        let m = cube_side(config);
        let mut out: Vec<Value> = vec![
            c.len().into(),
            (attempts as usize).into(),
            largest.into(),
            checked.into(),
            mismatches.into(),
            is_locally_maximal(&c, &exact, h, m, config.s_max)?.into(),
        ];
        let starts = [
            Thinning::new(&c, Vec::new(), Source::Empty),
            matern_one(&c),
            random_maximal(&c, derive_seed(seed, "random-maximal", 0)),
        ];
        let mut hard_core = is_hard_core(&c, &exact.kept);
        for start in &starts {
            let imp = local_improve(&c, start, h, m, config.s_max, config.max_rounds)?;
            hard_core &= is_hard_core(&c, &imp.thinning.kept);
            out.push((imp.thinning.kept == exact.kept).into());
            out.push(imp.converged.into());
            out.push(imp.rounds.into());
        }
        out.push(hard_core.into());
        Ok(out)
    })]
}

pub fn assess(_config: &ExperimentConfig, layout: &Layout, rows: &[Row]) -> Vec<Assertion> {
    vec![
        all_zero("exact_matches_enumeration", layout, rows, "oracle_mismatches"),
        all_set("exact_is_locally_maximal", layout, rows, "exact_locally_maximal"),
        all_set("empty_start_reaches_exact", layout, rows, "equal_empty"),
        all_set("matern_start_reaches_exact", layout, rows, "equal_matern"),
        all_set("random_start_reaches_exact", layout, rows, "equal_random"),
        all_set("hard_core", layout, rows, "hard_core_ok"),
    ]
}
