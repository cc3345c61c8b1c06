//! Retained intensity of the thinning that keeps isolated grains.
//!
//! Columns: `grains`, `retained`, `retained_intensity`, `hard_core_ok`.
//! For a fixed radius the mean is compared with the Poisson void
//! probability `γ exp(-γ |B_{2r}|)`.

use hardcore_core::model::unit_ball_volume;
use hardcore_core::thinning::is_hard_core;
use hardcore_core::{matern_one, RadiusLaw};

use super::{all_set, sample, timed, torus, Point};
use crate::config::ExperimentConfig;
use crate::output::{summarize, Assertion, Layout, Row};

pub const LAYOUT: Layout = Layout {
    params: &[],
    metrics: &["grains", "retained", "retained_intensity", "hard_core_ok"],
};

pub fn run(config: &ExperimentConfig, seed: u64) -> Vec<Point> {
    vec![timed(Vec::new(), || {
        let window = torus(config, config.side)?;
        let c = sample(config, window, seed)?;
        let t = matern_one(&c);
        Ok(vec![
            c.len().into(),
            t.len().into(),
            (t.len() as f64 / window.volume()).into(),
            is_hard_core(&c, &t.kept).into(),
        ])
    })]
}

/// `γ exp(-γ |B_{2r}|)` for a fixed radius.
pub fn expected_intensity(config: &ExperimentConfig) -> Option<f64> {
    match config.radius_law() {
        RadiusLaw::Fixed(r) => {
            let d = config.dimension;
            let g = config.intensity;
            Some(g * (-g * unit_ball_volume(d) * (2.0 * r).powi(d as i32)).exp())
        }
        _ => None,
    }
}

pub fn assess(config: &ExperimentConfig, layout: &Layout, rows: &[Row]) -> Vec<Assertion> {
    let refs: Vec<&Row> = rows.iter().collect();
    let mut out = vec![all_set("hard_core", layout, rows, "hard_core_ok")];
    if let (Some(want), Some(s)) = (expected_intensity(config), summarize(layout, &refs, "retained_intensity")) {
        let z = (s.mean - want) / s.std_error;
        out.push(Assertion::new(
            "intensity_matches_void_probability",
            (s.mean - want).abs() <= 4.0 * s.std_error,
            format!("mean {:.6}, expected {want:.6}, se {:.6}, z {z:.3}", s.mean, s.std_error),
        ));
    }
    out
}
