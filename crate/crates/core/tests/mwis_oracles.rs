mod common;

use common::*;
use hardcore_core::graph::{build_contact_graph, connected_components};
use hardcore_core::model::{Configuration, Grain, RadiusLaw, Window};
use hardcore_core::{brute_force, sample_poisson, solve_exact, WeightSpec};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_components(c: &Configuration, lo: usize, hi: usize) -> Vec<Vec<usize>> {
    connected_components(&build_contact_graph(c))
        .into_iter()
        .filter(|comp| (lo..=hi).contains(&comp.len()))
        .collect()
}

#[test]
fn exact_solver_matches_subset_enumeration() {
    let specs = [WeightSpec::Volume, WeightSpec::Unit, WeightSpec::ExpRadius(3.0)];
    let mut checked = 0;
    for seed in 0..60 {
        let c = sample_poisson(1.0, RadiusLaw::Uniform { lo: 0.3, hi: 0.5 }, Window::torus(2, 12.0).unwrap(), seed).unwrap();
        for comp in small_components(&c, 2, 15) {
            for h in specs {
                let got = solve_exact(&comp, &c, h, 64).unwrap();
                let (best, argmax) = exhaustive_mwis(&c, &comp, |i| h.weight(&c.grains()[i], 2));
                assert!((got.total_weight - best).abs() <= 1e-9 * best.max(1.0), "seed {seed} {h:?}");
                assert!(argmax.contains(&got.chosen), "seed {seed} {h:?}: {:?} not optimal", got.chosen);
                assert_eq!(got.chosen, brute_force(&comp, &c, h).unwrap().chosen);
                checked += 1;
            }
        }
    }
    assert!(checked > 100, "only {checked} components");
}

#[test]
fn solution_is_invariant_under_relabelling() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for seed in 0..40 {
        let c = sample_poisson(1.0, RadiusLaw::Uniform { lo: 0.3, hi: 0.5 }, Window::torus(2, 10.0).unwrap(), seed).unwrap();
        let mut perm: Vec<usize> = (0..c.len()).collect();
        perm.shuffle(&mut rng);
        // Grain perm[i] of the relabelled configuration is grain i here.
        let mut grains = vec![Grain::new(0, [0.0; 3], 1.0); c.len()];
        for (i, g) in c.grains().iter().enumerate() {
            grains[perm[i]] = Grain::new(perm[i], g.center, g.radius);
        }
        let d = Configuration::new(*c.window(), grains).unwrap();
        let all: Vec<usize> = (0..c.len()).collect();
        let a = solve_exact(&all, &c, WeightSpec::Volume, 64).unwrap();
        let b = solve_exact(&all, &d, WeightSpec::Volume, 64).unwrap();
        let mut mapped: Vec<usize> = a.chosen.iter().map(|&i| perm[i]).collect();
        mapped.sort_unstable();
        assert_eq!(mapped, b.chosen, "seed {seed}");
    }
}

#[test]
fn adding_a_grain_never_lowers_the_optimum() {
    for seed in 0..40 {
        let c = sample_poisson(1.0, RadiusLaw::Uniform { lo: 0.3, hi: 0.5 }, Window::torus(2, 8.0).unwrap(), seed).unwrap();
        for comp in small_components(&c, 3, 12) {
            let full = solve_exact(&comp, &c, WeightSpec::Volume, 64).unwrap();
            let fewer = solve_exact(&comp[1..], &c, WeightSpec::Volume, 64).unwrap();
            assert!(full.total_weight >= fewer.total_weight - 1e-12);
        }
    }
}

#[test]
fn equal_weights_break_ties_by_position() {
    // Two overlapping unit discs; the one with the smaller center wins either way round.
    let w = Window::torus(2, 10.0).unwrap();
    for order in [[[1.0, 0.0, 0.0], [0.0, 0.0, 0.0]], [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]] {
        let c = Configuration::from_balls(w, &[(order[0], 1.0), (order[1], 1.0)]).unwrap();
        let got = solve_exact(&[0, 1], &c, WeightSpec::Volume, 4).unwrap();
        assert_eq!(c.grains()[got.chosen[0]].center, [0.0; 3]);
    }
}

#[test]
fn oversized_component_is_reported() {
    let c = sample_poisson(3.0, RadiusLaw::Fixed(0.5), Window::torus(2, 10.0).unwrap(), 1).unwrap();
    let all: Vec<usize> = (0..c.len()).collect();
    assert!(solve_exact(&all, &c, WeightSpec::Volume, 15).is_err());
}
