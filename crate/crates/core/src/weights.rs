//! Grain weights `h` and exact-as-possible comparison of weight sums.
//!
//! Exponential radius weights `exp(a r)` overflow `f64` long before the
//! interesting regime (`a = 8^4` in the plane), so all comparisons are made
//! on log-weights. Sums are compared after cancelling shared grains, which
//! keeps two sets that differ only in light grains distinguishable even
//! when the heavy grains dominate by hundreds of orders of magnitude.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::model::{unit_ball_volume, Configuration, Grain};

/// Selects the grain functional `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightSpec {
    /// `h = 1`: plain intensity.
    Unit,
    /// `h = λ_d`: grain volume.
    Volume,
    /// `h_a(B_r(x)) = exp(a r)`.
    ExpRadius(f64),
}

impl WeightSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            WeightSpec::ExpRadius(a) if !(a.is_finite() && a >= 1.0) => Err(
                Error::InvalidParameter(format!("exponential weight needs a >= 1, got {a}")),
            ),
            _ => Ok(()),
        }
    }

    pub fn weight(&self, g: &Grain, dim: usize) -> f64 {
        weight(g, *self, dim)
    }

    pub fn log_weight(&self, g: &Grain, dim: usize) -> f64 {
        match *self {
            WeightSpec::Unit => 0.0,
            WeightSpec::Volume => unit_ball_volume(dim).ln() + dim as f64 * g.radius.ln(),
            WeightSpec::ExpRadius(a) => a * g.radius,
        }
    }
}

/// `h(g)` in linear scale. May be infinite for large exponential weights.
pub fn weight(g: &Grain, h: WeightSpec, dim: usize) -> f64 {
    match h {
        WeightSpec::Unit => 1.0,
        WeightSpec::Volume => unit_ball_volume(dim) * g.radius.powi(dim as i32),
        WeightSpec::ExpRadius(a) => (a * g.radius).exp(),
    }
}

/// `ln Σ exp(v)` over the values, summed largest first. Empty input gives `-inf`.
pub fn log_sum_exp(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NEG_INFINITY;
    }
    values.sort_unstable_by(|a, b| b.total_cmp(a));
    let top = values[0];
    if top == f64::NEG_INFINITY {
        return top;
    }
    let tail: f64 = values[1..].iter().map(|v| (v - top).exp()).sum();
    top + tail.ln_1p()
}

/// Per-grain log-weights of one configuration.
#[derive(Debug, Clone)]
pub struct WeightTable {
    spec: WeightSpec,
    dim: usize,
    log: Vec<f64>,
    linear: Vec<f64>,
}

impl WeightTable {
    pub fn new(config: &Configuration, spec: WeightSpec) -> Self {
        let dim = config.dim();
        let log = config.grains().iter().map(|g| spec.log_weight(g, dim)).collect();
        let linear = config.grains().iter().map(|g| weight(g, spec, dim)).collect();
        WeightTable { spec, dim, log, linear }
    }

    pub fn spec(&self) -> WeightSpec {
        self.spec
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn log_weight(&self, id: usize) -> f64 {
        self.log[id]
    }

    pub fn weight(&self, id: usize) -> f64 {
        self.linear[id]
    }

    /// Linear-scale total, summed in ascending id order.
    pub fn total(&self, ids: &[usize]) -> f64 {
        let mut sorted = ids.to_vec();
        sorted.sort_unstable();
        sorted.iter().map(|&i| self.linear[i]).sum()
    }

    pub fn log_total(&self, ids: &[usize]) -> f64 {
        let mut v: Vec<f64> = ids.iter().map(|&i| self.log[i]).collect();
        log_sum_exp(&mut v)
    }

    /// Compares `Σ_{lhs} h` with `Σ_{rhs} h`. Ids occurring on both sides cancel.
    pub fn compare_totals(&self, lhs: &[usize], rhs: &[usize]) -> Ordering {
        let mut left: Vec<usize> = lhs.to_vec();
        let mut right: Vec<usize> = rhs.to_vec();
        left.sort_unstable();
        right.sort_unstable();
        let (mut a, mut b) = (Vec::new(), Vec::new());
        let (mut i, mut j) = (0, 0);
        while i < left.len() || j < right.len() {
            match (left.get(i), right.get(j)) {
                (Some(x), Some(y)) if x == y => {
                    i += 1;
                    j += 1;
                }
                (Some(x), Some(y)) if x < y => {
                    a.push(self.log[*x]);
                    i += 1;
                }
                (Some(_), Some(y)) => {
                    b.push(self.log[*y]);
                    j += 1;
                }
                (Some(x), None) => {
                    a.push(self.log[*x]);
                    i += 1;
                }
                (None, Some(y)) => {
                    b.push(self.log[*y]);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        compare_log_multisets(&mut a, &mut b)
    }
}

/// Compares `Σ exp(a)` with `Σ exp(b)`.
fn compare_log_multisets(a: &mut [f64], b: &mut [f64]) -> Ordering {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => return Ordering::Equal,
        (true, false) => return Ordering::Less,
        (false, true) => return Ordering::Greater,
        _ => {}
    }
    a.sort_unstable_by(|x, y| y.total_cmp(x));
    b.sort_unstable_by(|x, y| y.total_cmp(x));
    if a == b {
        return Ordering::Equal;
    }
    let la = log_sum_exp(a);
    let lb = log_sum_exp(b);
    la.total_cmp(&lb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Window;

    fn grain(r: f64) -> Grain {
        Grain::new(0, [0.0; 3], r)
    }

    #[test]
    fn unit_weight_is_one() {
        assert_eq!(weight(&grain(0.3), WeightSpec::Unit, 2), 1.0);
    }

    #[test]
    fn volume_of_unit_disk_is_pi() {
        let w = weight(&grain(1.0), WeightSpec::Volume, 2);
        assert!((w - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn exp_radius_weight() {
        let w = weight(&grain(0.5), WeightSpec::ExpRadius(2.0), 2);
        assert!((w - std::f64::consts::E).abs() < 1e-12);
    }

    #[test]
    fn exp_radius_requires_a_at_least_one() {
        assert!(WeightSpec::ExpRadius(0.5).validate().is_err());
        assert!(WeightSpec::ExpRadius(1.0).validate().is_ok());
    }

    #[test]
    fn log_weight_matches_linear() {
        for spec in [WeightSpec::Unit, WeightSpec::Volume, WeightSpec::ExpRadius(3.0)] {
            for d in 1..=3 {
                let g = grain(0.7);
                let lin = weight(&g, spec, d);
                assert!((spec.log_weight(&g, d).exp() - lin).abs() < 1e-12 * lin);
            }
        }
    }

    #[test]
    fn weight_increasing_in_radius() {
        for spec in [WeightSpec::Volume, WeightSpec::ExpRadius(1.5)] {
            let mut prev = 0.0;
            for k in 1..50 {
                let w = weight(&grain(k as f64 * 0.05), spec, 3);
                assert!(w > prev);
                prev = w;
            }
        }
    }

    #[test]
    fn comparison_survives_huge_exponents() {
        let w = Window::torus(2, 100.0).unwrap();
        let c = Configuration::from_balls(
            w,
            &[([0.0; 3], 0.9), ([10.0, 0.0, 0.0], 0.3), ([20.0, 0.0, 0.0], 0.31)],
        )
        .unwrap();
        let t = WeightTable::new(&c, WeightSpec::ExpRadius(4096.0));
        assert!(t.weight(0).is_infinite());
        // {0, 2} beats {0, 1} although both totals overflow.
        assert_eq!(t.compare_totals(&[0, 2], &[0, 1]), Ordering::Greater);
        assert_eq!(t.compare_totals(&[0, 1], &[1, 0]), Ordering::Equal);
        assert_eq!(t.compare_totals(&[], &[1]), Ordering::Less);
    }

    #[test]
    fn equal_weight_multisets_tie() {
        let w = Window::torus(2, 100.0).unwrap();
        let balls: Vec<_> = (0..4).map(|i| ([i as f64 * 3.0, 0.0, 0.0], 0.5)).collect();
        let c = Configuration::from_balls(w, &balls).unwrap();
        let t = WeightTable::new(&c, WeightSpec::Volume);
        assert_eq!(t.compare_totals(&[0, 1], &[2, 3]), Ordering::Equal);
    }
}
