//! Independent reference implementations used by the integration tests.

#![allow(dead_code)]

use hardcore_core::model::{Configuration, Grain, RadiusLaw, Window};
use hardcore_core::sample_poisson;

/// Plain Euclidean or minimal-image distance, recomputed from scratch.
pub fn dist(window: &Window, a: &Grain, b: &Grain) -> f64 {
    let mut s = 0.0;
    for k in 0..window.dim {
        let mut d = a.center[k] - b.center[k];
        if let Some(side) = window.torus_side() {
            while d > side / 2.0 {
                d -= side;
            }
            while d < -side / 2.0 {
                d += side;
            }
        }
        s += d * d;
    }
    s.sqrt()
}

pub fn overlaps(c: &Configuration, i: usize, j: usize) -> bool {
    let (a, b) = (&c.grains()[i], &c.grains()[j]);
    dist(c.window(), a, b) < a.radius + b.radius
}

/// O(n²) adjacency lists.
pub fn pairwise_adjacency(c: &Configuration) -> Vec<Vec<usize>> {
    (0..c.len())
        .map(|i| (0..c.len()).filter(|&j| j != i && overlaps(c, i, j)).collect())
        .collect()
}

/// Components by breadth-first search, each sorted, ordered by smallest id.
pub fn bfs_components(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; adj.len()];
    let mut out = Vec::new();
    for s in 0..adj.len() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut head = 0;
        while head < comp.len() {
            let i = comp[head];
            head += 1;
            for &j in &adj[i] {
                if !seen[j] {
                    seen[j] = true;
                    comp.push(j);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

pub fn pairwise_hard_core(c: &Configuration, ids: &[usize]) -> bool {
    ids.iter()
        .enumerate()
        .all(|(a, &i)| ids[a + 1..].iter().all(|&j| !overlaps(c, i, j)))
}

pub fn volume(c: &Configuration, i: usize) -> f64 {
    let r = c.grains()[i].radius;
    match c.dim() {
        1 => 2.0 * r,
        2 => std::f64::consts::PI * r * r,
        _ => 4.0 / 3.0 * std::f64::consts::PI * r * r * r,
    }
}

pub fn subcritical(seed: u64, intensity: f64) -> Configuration {
    sample_poisson(
        intensity,
        RadiusLaw::Uniform { lo: 0.3, hi: 0.5 },
        Window::torus(2, 20.0).unwrap(),
        seed,
    )
    .unwrap()
}

/// Exhaustive maximum-weight independent subset of `ids` by subset
/// enumeration; returns the best total and every subset attaining it.
pub fn exhaustive_mwis(c: &Configuration, ids: &[usize], w: impl Fn(usize) -> f64) -> (f64, Vec<Vec<usize>>) {
    let n = ids.len();
    assert!(n <= 20);
    let mut best = 0.0;
    let mut arg: Vec<Vec<usize>> = vec![Vec::new()];
    for mask in 1u32..(1 << n) {
        let set: Vec<usize> = (0..n).filter(|b| mask >> b & 1 == 1).map(|b| ids[b]).collect();
        if !pairwise_hard_core(c, &set) {
            continue;
        }
        let total: f64 = set.iter().map(|&i| w(i)).sum();
        if total > best + 1e-12 {
            best = total;
            arg = vec![set];
        } else if (total - best).abs() <= 1e-12 {
            arg.push(set);
        }
    }
    (best, arg)
}
