mod common;

use common::*;
use hardcore_core::graph::{build_contact_graph, build_directed_graph, cluster, connected_components};
use hardcore_core::model::{sample_poisson, RadiusLaw, Window};

fn windows() -> Vec<Window> {
    vec![
        Window::torus(2, 8.0).unwrap(),
        Window::torus(3, 6.0).unwrap(),
        Window::torus(1, 12.0).unwrap(),
        Window::free_ball(2, 5.0).unwrap(),
        Window::free_ball(3, 4.0).unwrap(),
    ]
}

#[test]
fn contact_graph_matches_pairwise_scan() {
    for (w, window) in windows().into_iter().enumerate() {
        for seed in 0..20 {
            let c = sample_poisson(0.6, RadiusLaw::Uniform { lo: 0.2, hi: 0.9 }, window, 1000 * w as u64 + seed).unwrap();
            let g = build_contact_graph(&c);
            let adj = pairwise_adjacency(&c);
            for i in 0..c.len() {
                let mut got = g.neighbors(i).to_vec();
                got.sort_unstable();
                assert_eq!(got, adj[i], "window {w} seed {seed} grain {i}");
            }
        }
    }
}

#[test]
fn components_match_breadth_first_search() {
    for seed in 0..30 {
        let c = sample_poisson(1.0, RadiusLaw::Uniform { lo: 0.3, hi: 0.6 }, Window::torus(2, 10.0).unwrap(), seed).unwrap();
        let mut got = connected_components(&build_contact_graph(&c));
        for comp in &mut got {
            comp.sort_unstable();
        }
        got.sort();
        let mut want = bfs_components(&pairwise_adjacency(&c));
        want.sort();
        assert_eq!(got, want, "seed {seed}");
    }
}

#[test]
fn directed_edges_point_to_strictly_larger_neighbours() {
    for seed in 0..20 {
        let c = sample_poisson(1.0, RadiusLaw::Uniform { lo: 0.3, hi: 0.6 }, Window::torus(2, 8.0).unwrap(), seed).unwrap();
        let d = build_directed_graph(&c);
        let adj = pairwise_adjacency(&c);
        let r = |i: usize| c.grains()[i].radius;
        for i in 0..c.len() {
            let mut got = d.successors(i).to_vec();
            got.sort_unstable();
            let want: Vec<usize> = adj[i].iter().copied().filter(|&j| r(i) < r(j)).collect();
            assert_eq!(got, want);
        }
        let order = d.topological_order().expect("radius order is acyclic");
        let mut pos = vec![0; c.len()];
        for (k, &i) in order.iter().enumerate() {
            pos[i] = k;
        }
        for i in 0..c.len() {
            assert!(d.successors(i).iter().all(|&j| pos[i] < pos[j]));
        }
    }
}

#[test]
fn cluster_matches_transitive_closure() {
    let mut checked = 0;
    for seed in 0..200 {
        let c = sample_poisson(0.4, RadiusLaw::Uniform { lo: 0.3, hi: 0.8 }, Window::torus(2, 8.0).unwrap(), seed).unwrap();
        let n = c.len();
        if n > 30 {
            continue;
        }
        let adj = pairwise_adjacency(&c);
        let mut reach = vec![vec![false; n]; n];
        for i in 0..n {
            reach[i][i] = true;
            for &j in &adj[i] {
                if c.grains()[i].radius < c.grains()[j].radius {
                    reach[i][j] = true;
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if reach[i][k] && reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
        let d = build_directed_graph(&c);
        for i in 0..n {
            let want: Vec<usize> = (0..n).filter(|&j| reach[i][j]).collect();
            assert_eq!(cluster(i, &d).unwrap(), want, "seed {seed} grain {i}");
        }
        checked += 1;
    }
    assert!(checked >= 20);
}

#[test]
fn cluster_rejects_unknown_grain() {
    let c = subcritical(1, 0.2);
    assert!(cluster(c.len(), &build_directed_graph(&c)).is_err());
}
