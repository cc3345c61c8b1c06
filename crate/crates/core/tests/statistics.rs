mod common;

use common::*;
use hardcore_core::estimators::{h_intensity, volume_fraction};
use hardcore_core::model::{Configuration, RadiusLaw, Window};
use hardcore_core::percolation::{color_with_marks, crossing_grid, Color, Marks};
use hardcore_core::dispensable::SpecialParse;
use hardcore_core::graph::build_contact_graph;
use hardcore_core::{component_max, matern_one, sample_poisson, sample_voronoi, WeightSpec};

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[test]
fn poisson_counts_have_the_right_mean_and_variance() {
    let w = Window::torus(2, 10.0).unwrap();
    let counts: Vec<f64> = (0..10_000)
        .map(|s| sample_poisson(1.0, RadiusLaw::Fixed(0.1), w, s).unwrap().len() as f64)
        .collect();
    let (mean, sd) = mean_sd(&counts);
    assert!((mean - 100.0).abs() < 0.3, "mean {mean}");
    // The variance of a Poisson(100) sample variance is about 2 * 100^2 / n.
    assert!((sd * sd - 100.0).abs() < 4.0 * (2.0 * 1e4 / 1e4_f64).sqrt(), "variance {}", sd * sd);
}

#[test]
fn sampled_centers_are_uniform() {
    let w = Window::free_ball(2, 3.0).unwrap();
    let mut inner = 0usize;
    let mut total = 0usize;
    for s in 0..500 {
        let c = sample_poisson(2.0, RadiusLaw::Fixed(0.1), w, s).unwrap();
        for g in c.grains() {
            assert!(g.center[0].hypot(g.center[1]) <= 3.0);
            inner += usize::from(g.center[0].hypot(g.center[1]) <= 1.5);
            total += 1;
        }
    }
    let p = inner as f64 / total as f64;
    let se = (0.25 * 0.75 / total as f64).sqrt();
    assert!((p - 0.25).abs() < 4.0 * se, "inner fraction {p}");
}

#[test]
fn voronoi_seed_count_has_the_right_mean() {
    let w = Window::torus(2, 10.0).unwrap();
    let counts: Vec<f64> = (0..4000).map(|s| sample_voronoi(w, 0.1, s).unwrap().len() as f64).collect();
    let (mean, sd) = mean_sd(&counts);
    assert!((mean - 10.0).abs() < 4.0 * sd / (counts.len() as f64).sqrt(), "mean {mean}");
}

#[test]
fn matern_retention_matches_void_probability() {
    let (r, gamma, side) = (0.4, 0.5, 30.0);
    let w = Window::torus(2, side).unwrap();
    let per: Vec<f64> = (0..400)
        .map(|s| {
            let c = sample_poisson(gamma, RadiusLaw::Fixed(r), w, s).unwrap();
            matern_one(&c).len() as f64 / (side * side)
        })
        .collect();
    let (mean, sd) = mean_sd(&per);
    let want = gamma * (-gamma * std::f64::consts::PI * (2.0 * r).powi(2)).exp();
    assert!((mean - want).abs() < 4.0 * sd / 20.0, "{mean} vs {want}");
}

#[test]
fn volume_intensity_agrees_with_covered_fraction() {
    let c = subcritical(3, 1.0);
    let t = component_max(&c, WeightSpec::Volume, 64).unwrap();
    let exact = h_intensity(&t, &c, WeightSpec::Volume).unwrap();
    let est = volume_fraction(&t, &c, 400_000, 9).unwrap();
    assert!((est.estimate - exact).abs() < 2.0 * est.half_width, "{est:?} vs {exact}");
    // Overlapping balls double count in the intensity but not in coverage.
    let all: Vec<usize> = (0..c.len()).collect();
    let loose = hardcore_core::Thinning::new(&c, all, hardcore_core::Source::External);
    let sum = h_intensity(&loose, &c, WeightSpec::Volume).unwrap();
    let cov = volume_fraction(&loose, &c, 100_000, 9).unwrap().estimate;
    assert!(cov < sum);
}

#[test]
fn activation_frequency_matches_p() {
    let w = Window::free_ball(2, 4.0).unwrap();
    let c = Configuration::from_balls(w, &[([0.0; 3], 1.0)]).unwrap();
    let g = build_contact_graph(&c);
    let n = 10_000;
    let red = (0..n)
        .filter(|&s| {
            let marks = Marks::draw(1, s);
            color_with_marks(&c, &g, &marks, 0.3, 0.5, SpecialParse::AllGrains).unwrap().color[0] == Color::Red
        })
        .count();
    let p = red as f64 / n as f64;
    assert!((p - 0.7).abs() < 4.0 * (0.21 / n as f64).sqrt(), "red fraction {p}");
}

#[test]
fn crossing_is_monotone_in_p_with_shared_marks() {
    let ps = [0.2, 0.4, 0.6, 0.8, 1.0];
    for s in 0..60 {
        let c = sample_poisson(0.6, RadiusLaw::Uniform { lo: 1.0, hi: 1.1 }, Window::free_ball(2, 6.0).unwrap(), s).unwrap();
        let marks = Marks::draw(c.len(), s + 1);
        for parse in [SpecialParse::AllGrains, SpecialParse::ActiveOnly] {
            let grid = crossing_grid(&c, &marks, &ps, &[1.0], 6.0, parse).unwrap();
            let col: Vec<bool> = grid.iter().map(|row| row[0]).collect();
            // With q = 1 no grain turns green, so uncolored means active.
            assert!(col.windows(2).all(|w| w[0] <= w[1]), "seed {s}: {col:?}");
        }
    }
}
