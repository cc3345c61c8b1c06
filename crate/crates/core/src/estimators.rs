//! Intensity and volume-fraction estimators and boundary-neighbourhood
//! coefficients of tessellations.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Configuration, Window, WindowKind};
use crate::rng::rng_on_stream;
use crate::spatial::SpatialGrid;
use crate::thinning::{Tessellation, Thinning};
use crate::weights::{WeightSpec, WeightTable};

/// Points drawn per independent substream.
const BATCH: usize = 1 << 14;

fn torus_volume(window: &Window) -> Result<f64> {
    match window.kind {
        WindowKind::Torus { .. } => Ok(window.volume()),
        WindowKind::FreeBall { .. } => Err(Error::InvalidWindow(
            "spatial averages need a torus window; free balls are boundary biased".into(),
        )),
    }
}

/// `Σ_{K kept} h(K) / L^d`.
pub fn h_intensity(t: &Thinning, config: &Configuration, h: WeightSpec) -> Result<f64> {
    h.validate()?;
    let volume = torus_volume(config.window())?;
    Ok(WeightTable::new(config, h).total(&t.kept) / volume)
}

/// Proportion estimate with the half-width of its normal 95% interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Proportion {
    pub estimate: f64,
    pub half_width: f64,
}

impl Proportion {
    pub fn from_counts(hits: usize, total: usize) -> Self {
        let estimate = hits as f64 / total as f64;
        Proportion { estimate, half_width: 1.96 * (estimate * (1.0 - estimate) / total as f64).sqrt() }
    }
}

/// Counts sample points for which `test` holds; batch `b` uses substream `b`
/// of `seed`, so the count does not depend on the number of workers.
fn count_points<F>(window: &Window, samples: usize, seed: u64, test: F) -> usize
where
    F: Fn(&[f64; 3]) -> bool + Sync,
{
    let batches = samples.div_ceil(BATCH);
    (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = rng_on_stream(seed, b as u64);
            let n = BATCH.min(samples - b * BATCH);
            (0..n).filter(|_| test(&window.sample_point(&mut rng))).count()
        })
        .sum()
}

/// Fraction of uniform sample points covered by a kept ball.
pub fn volume_fraction(t: &Thinning, config: &Configuration, samples: usize, seed: u64) -> Result<Proportion> {
    let window = *config.window();
    torus_volume(&window)?;
    if samples == 0 {
        return Err(Error::InvalidParameter("at least one sample point is required".into()));
    }
    let grains = config.grains();
    let rmax = t.kept.iter().map(|&i| grains[i].radius).fold(0.0, f64::max);
    let grid = SpatialGrid::new(&window, t.kept.iter().map(|&i| (i, grains[i].center)), 2.0 * rmax);
    let hits = count_points(&window, samples, seed, |p| {
        let mut covered = false;
        grid.visit(p, rmax, |i| {
            covered = covered || window.distance(p, &grains[i].center) <= grains[i].radius;
        });
        covered
    });
    Ok(Proportion::from_counts(hits, samples))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isoperimetric {
    /// Fraction of points within sup-distance `m` of a cell boundary.
    pub union: Proportion,
    /// Mean number of cell boundaries within sup-distance `m` of a point,
    /// an upper bound for the per-cell sum of dilated boundary volumes.
    pub per_cell_upper: f64,
}

/// Sampled boundary-neighbourhood coefficient of a tessellation of the torus.
pub fn isoperimetric_coefficient(
    tess: &Tessellation,
    m: f64,
    samples: usize,
    seed: u64,
) -> Result<Isoperimetric> {
    let window = *tess.window();
    torus_volume(&window)?;
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::InvalidParameter(format!("m must be positive, got {m}")));
    }
    if samples == 0 {
        return Err(Error::InvalidParameter("at least one sample point is required".into()));
    }
    let batches = samples.div_ceil(BATCH);
    let (hits, cells): (usize, usize) = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = rng_on_stream(seed, b as u64);
            let n = BATCH.min(samples - b * BATCH);
            let mut hits = 0;
            let mut cells = 0;
            for _ in 0..n {
                let (meets, others) = tess.cube_meets_boundary(&window.sample_point(&mut rng), m);
                if meets {
                    hits += 1;
                    cells += 1 + others;
                }
            }
            (hits, cells)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(Isoperimetric {
        union: Proportion::from_counts(hits, samples),
        per_cell_upper: cells as f64 / samples as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Window;
    use crate::thinning::Source;

    fn one_ball(r: f64) -> Configuration {
        Configuration::from_balls(Window::torus(2, 10.0).unwrap(), &[([0.0; 3], r)]).unwrap()
    }

    #[test]
    fn empty_thinning_has_zero_intensity() {
        let c = one_ball(1.0);
        assert_eq!(h_intensity(&Thinning::empty(), &c, WeightSpec::Volume).unwrap(), 0.0);
        assert_eq!(volume_fraction(&Thinning::empty(), &c, 1000, 1).unwrap().estimate, 0.0);
    }

    #[test]
    fn single_ball_intensity() {
        let c = one_ball(1.0);
        let t = Thinning::new(&c, vec![0], Source::External);
        let v = h_intensity(&t, &c, WeightSpec::Volume).unwrap();
        assert!((v - std::f64::consts::PI / 100.0).abs() < 1e-15);
        let vf = volume_fraction(&t, &c, 1_000_000, 7).unwrap();
        assert!((vf.estimate - v).abs() <= vf.half_width);
    }

    #[test]
    fn free_ball_is_rejected() {
        let c = Configuration::empty(Window::free_ball(2, 5.0).unwrap());
        assert!(h_intensity(&Thinning::empty(), &c, WeightSpec::Unit).is_err());
    }

    #[test]
    fn volume_fraction_is_deterministic() {
        let c = one_ball(2.0);
        let t = Thinning::new(&c, vec![0], Source::External);
        assert_eq!(volume_fraction(&t, &c, 50_000, 3), volume_fraction(&t, &c, 50_000, 3));
    }

    #[test]
    fn single_cell_and_saturation() {
        let w = Window::torus(2, 10.0).unwrap();
        let one = Tessellation::new(w, vec![[0.0; 3]]).unwrap();
        assert_eq!(isoperimetric_coefficient(&one, 1.0, 10_000, 1).unwrap().union.estimate, 0.0);
        let two = Tessellation::new(w, vec![[-2.5, 0.0, 0.0], [2.5, 0.0, 0.0]]).unwrap();
        let full = isoperimetric_coefficient(&two, 6.0, 10_000, 1).unwrap();
        assert_eq!(full.union.estimate, 1.0);
        // Two straight boundaries of a 10 x 10 torus dilated by 1: 2 * 2 * 10 / 100.
        let thin = isoperimetric_coefficient(&two, 1.0, 200_000, 2).unwrap();
        assert!((thin.union.estimate - 0.4).abs() < 4.0 * thin.union.half_width, "{thin:?}");
        assert!(thin.per_cell_upper >= thin.union.estimate);
    }
}
