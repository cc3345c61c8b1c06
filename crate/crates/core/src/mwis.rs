//! Exact maximum-weight hard-core subsets of grain sets.
//!
//! The solver splits the induced contact graph into connected components and
//! runs a branch-and-bound search on each. Among co-optimal subsets the one
//! whose sorted list of `(center, radius)` keys is lexicographically smallest
//! wins; the rule depends on geometry only, never on ids or input order.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::graph::{build_contact_graph, ContactGraph};
use crate::model::{interiors_overlap, Configuration};
use crate::weights::{WeightSpec, WeightTable};

pub const DEFAULT_CAP: usize = 40;
/// Components are stored as 64-bit masks.
pub const MAX_CAP: usize = 64;
pub const BRUTE_FORCE_LIMIT: usize = 20;

/// Absolute tolerance on weights normalised so that the heaviest grain of
/// the component weighs 1. Candidates closer than this are compared exactly.
const TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct MwisResult {
    pub chosen: Vec<usize>,
    pub total_weight: f64,
    pub log_weight: f64,
    pub optimal: bool,
}

impl MwisResult {
    fn from_chosen(mut chosen: Vec<usize>, weights: &WeightTable) -> Self {
        chosen.sort_unstable();
        MwisResult {
            total_weight: weights.total(&chosen),
            log_weight: weights.log_total(&chosen),
            chosen,
            optimal: true,
        }
    }
}

/// Lexicographic order on the sorted `(center, radius)` keys of two grain sets.
pub fn tie_order(config: &Configuration, a: &[usize], b: &[usize]) -> Ordering {
    let dim = config.dim();
    let keys = |ids: &[usize]| -> Vec<[f64; 4]> {
        let mut k: Vec<[f64; 4]> = ids
            .iter()
            .map(|&i| {
                let g = &config.grains()[i];
                let mut key = [0.0; 4];
                key[..dim].copy_from_slice(&g.center[..dim]);
                key[dim] = g.radius;
                key
            })
            .collect();
        k.sort_unstable_by(cmp_key);
        k
    };
    let (ka, kb) = (keys(a), keys(b));
    for (x, y) in ka.iter().zip(&kb) {
        let c = cmp_key(x, y);
        if c != Ordering::Equal {
            return c;
        }
    }
    ka.len().cmp(&kb.len())
}

fn cmp_key(x: &[f64; 4], y: &[f64; 4]) -> Ordering {
    x.iter()
        .zip(y)
        .map(|(a, b)| a.total_cmp(b))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or(Ordering::Equal)
}

/// True when `a` beats `b`: heavier, or equally heavy and smaller tie key.
pub fn prefer(config: &Configuration, weights: &WeightTable, a: &[usize], b: &[usize]) -> bool {
    match weights.compare_totals(a, b) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => tie_order(config, a, b) == Ordering::Less,
    }
}

/// Exact solver sharing one contact graph and weight table across calls.
pub struct MwisSolver<'a> {
    config: &'a Configuration,
    graph: &'a ContactGraph,
    weights: &'a WeightTable,
}

impl<'a> MwisSolver<'a> {
    pub fn new(config: &'a Configuration, graph: &'a ContactGraph, weights: &'a WeightTable) -> Self {
        MwisSolver { config, graph, weights }
    }

    /// Maximum-weight hard-core subset of `ids`.
    pub fn solve(&self, ids: &[usize], cap: usize) -> Result<MwisResult> {
        let cap = cap.min(MAX_CAP);
        for &i in ids {
            if i >= self.config.len() {
                return Err(Error::UnknownGrain(i));
            }
        }
        let components = self.graph.induced_components(ids);
        if let Some(big) = components.iter().find(|c| c.len() > cap) {
            return Err(Error::ComponentTooLarge { size: big.len(), cap });
        }
        let mut chosen = Vec::new();
        for comp in &components {
            chosen.extend(self.solve_component(comp));
        }
        Ok(MwisResult::from_chosen(chosen, self.weights))
    }

    fn solve_component(&self, ids: &[usize]) -> Vec<usize> {
        if ids.len() == 1 {
            return ids.to_vec();
        }
        let local = LocalGraph::new(ids, self.weights, |i, j| self.graph.adjacent(i, j));
        let mut search = Search {
            local: &local,
            config: self.config,
            weights: self.weights,
            best: None,
        };
        let all = if ids.len() == 64 { u64::MAX } else { (1u64 << ids.len()) - 1 };
        search.branch(all, 0, 0.0);
        let (mask, _) = search.best.expect("non-empty component has a solution");
        local.ids_of(mask)
    }
}

/// A component relabelled to `0..k` with bitmask adjacency.
struct LocalGraph {
    ids: Vec<usize>,
    adj: Vec<u64>,
    weight: Vec<f64>,
    by_weight: Vec<usize>,
}

impl LocalGraph {
    fn new<F: Fn(usize, usize) -> bool>(ids: &[usize], weights: &WeightTable, adjacent: F) -> Self {
        let k = ids.len();
        let mut adj = vec![0u64; k];
        for a in 0..k {
            for b in (a + 1)..k {
                if adjacent(ids[a], ids[b]) {
                    adj[a] |= 1 << b;
                    adj[b] |= 1 << a;
                }
            }
        }
        let top = ids.iter().map(|&i| weights.log_weight(i)).fold(f64::NEG_INFINITY, f64::max);
        let weight: Vec<f64> = ids.iter().map(|&i| (weights.log_weight(i) - top).exp()).collect();
        let mut by_weight: Vec<usize> = (0..k).collect();
        by_weight.sort_by(|&a, &b| weight[b].total_cmp(&weight[a]).then(a.cmp(&b)));
        LocalGraph { ids: ids.to_vec(), adj, weight, by_weight }
    }

    fn ids_of(&self, mask: u64) -> Vec<usize> {
        bits(mask).map(|b| self.ids[b]).collect()
    }

    /// Greedy clique cover of `cand`; each clique contributes its heaviest member.
    fn clique_bound(&self, cand: u64) -> f64 {
        let mut cliques: Vec<u64> = Vec::new();
        let mut bound = 0.0;
        for &v in &self.by_weight {
            if cand & (1 << v) == 0 {
                continue;
            }
            match cliques.iter_mut().find(|c| **c & !self.adj[v] == 0) {
                Some(c) => *c |= 1 << v,
                None => {
                    cliques.push(1 << v);
                    bound += self.weight[v];
                }
            }
        }
        bound
    }
}

fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let b = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(b)
        }
    })
}

struct Search<'s> {
    local: &'s LocalGraph,
    config: &'s Configuration,
    weights: &'s WeightTable,
    best: Option<(u64, f64)>,
}

impl Search<'_> {
    fn branch(&mut self, cand: u64, chosen: u64, value: f64) {
        if cand == 0 {
            self.offer(chosen, value);
            return;
        }
        if let Some((_, best)) = self.best {
            if value + self.local.clique_bound(cand) < best - TOL {
                return;
            }
        }
        let mut pivot = usize::MAX;
        let mut pivot_degree = 0;
        for v in bits(cand) {
            let d = (self.local.adj[v] & cand).count_ones();
            if pivot == usize::MAX || d > pivot_degree {
                pivot = v;
                pivot_degree = d;
            }
        }
        if pivot_degree == 0 {
            let gain: f64 = bits(cand).map(|v| self.local.weight[v]).sum();
            self.offer(chosen | cand, value + gain);
            return;
        }
        let bit = 1u64 << pivot;
        self.branch(cand & !bit & !self.local.adj[pivot], chosen | bit, value + self.local.weight[pivot]);
        self.branch(cand & !bit, chosen, value);
    }

    fn offer(&mut self, mask: u64, value: f64) {
        let better = match self.best {
            None => true,
            Some((_, best)) if value > best + TOL => true,
            Some((_, best)) if value < best - TOL => false,
            Some((current, _)) => prefer(
                self.config,
                self.weights,
                &self.local.ids_of(mask),
                &self.local.ids_of(current),
            ),
        };
        if better {
            self.best = Some((mask, value));
        }
    }
}

/// Exact maximum-weight hard-core subset of `ids`.
///
/// Fails with [`Error::ComponentTooLarge`] when a connected component of the
/// induced contact graph has more than `cap` grains.
pub fn solve_exact(
    ids: &[usize],
    config: &Configuration,
    h: WeightSpec,
    cap: usize,
) -> Result<MwisResult> {
    h.validate()?;
    let graph = build_contact_graph(config);
    let weights = WeightTable::new(config, h);
    MwisSolver::new(config, &graph, &weights).solve(ids, cap)
}

/// Exhaustive enumeration over all subsets of `ids`, with the same tie rule.
pub fn brute_force(ids: &[usize], config: &Configuration, h: WeightSpec) -> Result<MwisResult> {
    h.validate()?;
    let mut ids = ids.to_vec();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() > BRUTE_FORCE_LIMIT {
        return Err(Error::TooManyGrains { got: ids.len(), max: BRUTE_FORCE_LIMIT });
    }
    if let Some(&bad) = ids.iter().find(|&&i| i >= config.len()) {
        return Err(Error::UnknownGrain(bad));
    }
    let weights = WeightTable::new(config, h);
    if ids.is_empty() {
        return Ok(MwisResult::from_chosen(Vec::new(), &weights));
    }
    let grains = config.grains();
    let local = LocalGraph::new(&ids, &weights, |i, j| {
        interiors_overlap(&grains[i], &grains[j], config.window())
    });
    let n = ids.len();
    let mut best: Option<(u64, f64)> = None;
    'masks: for mask in 0u64..(1u64 << n) {
        let mut value = 0.0;
        for b in bits(mask) {
            if local.adj[b] & mask != 0 {
                continue 'masks;
            }
            value += local.weight[b];
        }
        let better = match best {
            None => true,
            Some((_, v)) if value > v + TOL => true,
            Some((_, v)) if value < v - TOL => false,
            Some((cur, _)) => prefer(config, &weights, &local.ids_of(mask), &local.ids_of(cur)),
        };
        if better {
            best = Some((mask, value));
        }
    }
    let (mask, _) = best.expect("the empty set is always feasible");
    Ok(MwisResult::from_chosen(local.ids_of(mask), &weights))
}
