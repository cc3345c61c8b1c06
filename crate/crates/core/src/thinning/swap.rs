//! Swaps of kept grains for excluded ones.
//!
//! A swap `(R, A)` removes `R` from the thinning and adds `A`. The smallest
//! admissible remove set of an add set is its set of kept neighbours
//! `N(A)`. Two added grains are linked when they share a kept neighbour;
//! every valid swap contains a linked piece `(A', N(A'))` that is valid by
//! itself, so searching linked pieces is enough to decide whether a valid
//! swap exists, and the best swap is a compatible union of such pieces.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::graph::{build_contact_graph, ContactGraph};
use crate::model::{Configuration, Point};
use crate::spatial::SpatialGrid;
use crate::weights::{WeightSpec, WeightTable};

use super::{Source, Thinning};

/// Largest admissible bound on `|R|` and `|A|`.
pub const MAX_SWAP_SIZE: usize = 16;

const TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Swap {
    pub remove: Vec<usize>,
    pub add: Vec<usize>,
}

impl Swap {
    pub fn is_empty(&self) -> bool {
        self.remove.is_empty() && self.add.is_empty()
    }
}

/// Whether `swap` strictly increases `Σh` and keeps `t` hard-core.
pub fn swap_is_valid(config: &Configuration, t: &Thinning, swap: &Swap, h: WeightSpec) -> bool {
    let weights = WeightTable::new(config, h);
    let mut after: Vec<usize> = t.kept.iter().copied().filter(|i| !swap.remove.contains(i)).collect();
    if swap.remove.iter().any(|&i| !t.contains(i)) || swap.add.iter().any(|&i| t.contains(i)) {
        return false;
    }
    after.extend(&swap.add);
    weights.compare_totals(&swap.add, &swap.remove) == Ordering::Greater
        && super::is_hard_core(config, &after)
}

/// Result of [`local_improve`].
#[derive(Debug, Clone, PartialEq)]
pub struct Improvement {
    pub thinning: Thinning,
    /// Number of swaps applied.
    pub rounds: usize,
    /// False when `max_rounds` stopped the search before it ran dry.
    pub converged: bool,
}

fn check_params(m: f64, s_max: usize) -> Result<()> {
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::InvalidParameter(format!("cube side m must be positive, got {m}")));
    }
    if !(1..=MAX_SWAP_SIZE).contains(&s_max) {
        return Err(Error::InvalidParameter(format!(
            "s_max must lie in 1..={MAX_SWAP_SIZE}, got {s_max}"
        )));
    }
    Ok(())
}

struct Searcher<'a> {
    config: &'a Configuration,
    graph: &'a ContactGraph,
    weights: &'a WeightTable,
    centers: &'a SpatialGrid,
    kept: Vec<bool>,
    half: f64,
    s: usize,
}

impl<'a> Searcher<'a> {
    fn kept_neighbors(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.graph.neighbors(a).iter().copied().filter(|&j| self.kept[j])
    }

    fn kept_degree(&self, a: usize) -> usize {
        self.kept_neighbors(a).count()
    }

    /// Whether every listed ball lies in the cube of side `m` centered at `p`.
    fn fits(&self, p: &Point, ids: &[usize]) -> bool {
        let window = self.config.window();
        let dim = self.config.dim();
        ids.iter().all(|&i| {
            let g = &self.config.grains()[i];
            let d = window.displacement(p, &g.center);
            d[..dim].iter().all(|x| x.abs() + g.radius <= self.half)
        })
    }

    /// Some grain center serves as a cube center holding all `ids`.
    fn feasible(&self, ids: &[usize]) -> bool {
        let grains = self.config.grains();
        if ids.iter().any(|&i| grains[i].radius > self.half) {
            return false;
        }
        if ids.iter().any(|&k| self.fits(&grains[k].center, ids)) {
            return true;
        }
        let anchor = grains[ids[0]].center;
        let reach = self.half * (self.config.dim() as f64).sqrt();
        self.centers.near(&anchor, reach).into_iter().any(|k| self.fits(&grains[k].center, ids))
    }

    /// Linked add sets containing `root` together with their remove sets.
    /// With `above_root` only sets whose smallest element is `root` are produced.
    fn pieces(&self, root: usize, above_root: bool, allowed: &dyn Fn(usize) -> bool) -> Vec<Swap> {
        let mut out = Vec::new();
        if self.kept[root] || !allowed(root) || self.kept_degree(root) > self.s {
            return out;
        }
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        let start = vec![root];
        seen.insert(start.clone());
        let mut stack = vec![start];
        while let Some(add) = stack.pop() {
            let mut remove: Vec<usize> = add.iter().flat_map(|&a| self.kept_neighbors(a)).collect();
            remove.sort_unstable();
            remove.dedup();
            if add.len() < self.s {
                let mut next = BTreeSet::new();
                for &k in &remove {
                    for &b in self.graph.neighbors(k) {
                        if self.kept[b] || add.contains(&b) || (above_root && b < root) {
                            continue;
                        }
                        if add.iter().any(|&a| self.graph.adjacent(a, b)) || !allowed(b) {
                            continue;
                        }
                        next.insert(b);
                    }
                }
                for b in next {
                    let extra = self.kept_neighbors(b).filter(|j| remove.binary_search(j).is_err());
                    if remove.len() + extra.count() > self.s {
                        continue;
                    }
                    let mut grown = add.clone();
                    grown.push(b);
                    grown.sort_unstable();
                    if seen.insert(grown.clone()) {
                        stack.push(grown);
                    }
                }
            }
            out.push(Swap { remove, add });
        }
        out
    }

    fn positive(&self, piece: &Swap) -> bool {
        self.weights.compare_totals(&piece.add, &piece.remove) == Ordering::Greater
    }

    /// True when the gain of `a` exceeds that of `b`, ties going to the
    /// lexicographically smaller `(remove, add)`.
    fn better(&self, a: &Swap, b: &Swap) -> bool {
        let lhs: Vec<usize> = a.add.iter().chain(&b.remove).copied().collect();
        let rhs: Vec<usize> = b.add.iter().chain(&a.remove).copied().collect();
        match self.weights.compare_totals(&lhs, &rhs) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => (&a.remove, &a.add) < (&b.remove, &b.add),
        }
    }

    /// Best valid linked piece whose add set contains `root`.
    fn best_piece(&self, root: usize) -> Option<Swap> {
        let mut best: Option<Swap> = None;
        for piece in self.pieces(root, false, &|_| true) {
            if !self.positive(&piece) {
                continue;
            }
            if best.as_ref().is_some_and(|b| !self.better(&piece, b)) {
                continue;
            }
            let mut ids = piece.add.clone();
            ids.extend(&piece.remove);
            if self.feasible(&ids) {
                best = Some(piece);
            }
        }
        best
    }

    fn has_valid_piece(&self, root: usize) -> bool {
        self.pieces(root, true, &|_| true).iter().any(|piece| {
            let mut ids = piece.add.clone();
            ids.extend(&piece.remove);
            self.positive(piece) && self.feasible(&ids)
        })
    }

    fn apply(&mut self, swap: &Swap) {
        for &r in &swap.remove {
            self.kept[r] = false;
        }
        for &a in &swap.add {
            self.kept[a] = true;
        }
    }

    /// Excluded grains within contact distance `depth` of the changed grains.
    fn affected(&self, swap: &Swap, depth: usize) -> Vec<usize> {
        let mut dist = std::collections::HashMap::new();
        let mut queue = VecDeque::new();
        for &i in swap.remove.iter().chain(&swap.add) {
            dist.insert(i, 0usize);
            queue.push_back(i);
        }
        while let Some(i) = queue.pop_front() {
            let d = dist[&i];
            if d == depth {
                continue;
            }
            for &j in self.graph.neighbors(i) {
                if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(j) {
                    e.insert(d + 1);
                    queue.push_back(j);
                }
            }
        }
        let mut out: Vec<usize> = dist.into_keys().filter(|&i| !self.kept[i]).collect();
        out.sort_unstable();
        out
    }

    fn kept_ids(&self) -> Vec<usize> {
        (0..self.kept.len()).filter(|&i| self.kept[i]).collect()
    }
}

/// Best valid swap with `|R|, |A| ≤ s_max` whose grains all lie in the cube
/// of side `m` centered at the center of grain `center`. `None` when no valid
/// swap exists there.
pub fn find_valid_swap(
    config: &Configuration,
    t: &Thinning,
    h: WeightSpec,
    center: usize,
    m: f64,
    s_max: usize,
) -> Result<Option<Swap>> {
    check_params(m, s_max)?;
    h.validate()?;
    let cube_center = config.grain(center)?.center;
    if !t.hard_core {
        return Err(Error::NotHardCore);
    }
    let graph = build_contact_graph(config);
    let weights = WeightTable::new(config, h);
    let centers = SpatialGrid::for_grains(config);
    let searcher = Searcher {
        config,
        graph: &graph,
        weights: &weights,
        centers: &centers,
        kept: t.mask(config.len()),
        half: m / 2.0,
        s: s_max,
    };
    let inside: Vec<bool> = (0..config.len()).map(|i| searcher.fits(&cube_center, &[i])).collect();
    let allowed = |a: usize| inside[a] && searcher.kept_neighbors(a).all(|k| inside[k]);

    let mut pieces = Vec::new();
    for root in 0..config.len() {
        if !searcher.kept[root] && allowed(root) {
            pieces.extend(
                searcher.pieces(root, true, &allowed).into_iter().filter(|p| searcher.positive(p)),
            );
        }
    }
    if pieces.is_empty() {
        return Ok(None);
    }

    // Gains rescaled by the heaviest grain involved, used for pruning only.
    let top = pieces
        .iter()
        .flat_map(|p| p.add.iter().chain(&p.remove))
        .map(|&i| weights.log_weight(i))
        .fold(f64::NEG_INFINITY, f64::max);
    let scaled = |p: &Swap| -> f64 {
        let sum = |ids: &[usize]| ids.iter().map(|&i| (weights.log_weight(i) - top).exp()).sum::<f64>();
        sum(&p.add) - sum(&p.remove)
    };
    let mut ranked: Vec<(f64, Swap)> = pieces.into_iter().map(|p| (scaled(&p), p)).collect();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(&b.1)));

    let mut combine = Combine {
        searcher: &searcher,
        ranked: &ranked,
        s: s_max,
        best: None,
        best_gain: f64::NEG_INFINITY,
    };
    let mut current = Swap { remove: Vec::new(), add: Vec::new() };
    combine.run(0, &mut current, 0.0);
    Ok(combine.best.map(|mut s| {
        s.add.sort_unstable();
        s.remove.sort_unstable();
        s
    }))
}

struct Combine<'a, 'b> {
    searcher: &'a Searcher<'b>,
    ranked: &'a [(f64, Swap)],
    s: usize,
    best: Option<Swap>,
    best_gain: f64,
}

impl Combine<'_, '_> {
    fn compatible(&self, current: &Swap, piece: &Swap) -> bool {
        current.add.len() + piece.add.len() <= self.s
            && current.remove.len() + piece.remove.len() <= self.s
            && piece.remove.iter().all(|r| !current.remove.contains(r))
            && piece.add.iter().all(|&a| {
                current.add.iter().all(|&b| a != b && !self.searcher.graph.adjacent(a, b))
            })
    }

    fn run(&mut self, from: usize, current: &mut Swap, gain: f64) {
        if !current.add.is_empty() {
            let mut sorted = current.clone();
            sorted.add.sort_unstable();
            sorted.remove.sort_unstable();
            if self.best.as_ref().is_none_or(|b| self.searcher.better(&sorted, b)) {
                self.best = Some(sorted);
                self.best_gain = gain;
            }
        }
        let room = self.s - current.add.len();
        let bound: f64 = self.ranked[from..].iter().take(room).map(|(g, _)| g).sum();
        if gain + bound < self.best_gain - TOL {
            return;
        }
        for j in from..self.ranked.len() {
            let (g, piece) = &self.ranked[j];
            if !self.compatible(current, piece) {
                continue;
            }
            let (na, nr) = (current.add.len(), current.remove.len());
            current.add.extend(&piece.add);
            current.remove.extend(&piece.remove);
            self.run(j + 1, current, gain + g);
            current.add.truncate(na);
            current.remove.truncate(nr);
        }
    }
}

/// Applies best valid swaps until none with `|R|, |A| ≤ s_max` fits in any
/// cube of side `m` centered at a grain center, or `max_rounds` swaps were made.
pub fn local_improve(
    config: &Configuration,
    t0: &Thinning,
    h: WeightSpec,
    m: f64,
    s_max: usize,
    max_rounds: usize,
) -> Result<Improvement> {
    check_params(m, s_max)?;
    h.validate()?;
    if !t0.hard_core {
        return Err(Error::NotHardCore);
    }
    let graph = build_contact_graph(config);
    let weights = WeightTable::new(config, h);
    local_improve_with(config, &graph, &weights, t0, m, s_max, max_rounds)
}

pub(crate) fn local_improve_with(
    config: &Configuration,
    graph: &ContactGraph,
    weights: &WeightTable,
    t0: &Thinning,
    m: f64,
    s_max: usize,
    max_rounds: usize,
) -> Result<Improvement> {
    let centers = SpatialGrid::for_grains(config);
    let mut searcher = Searcher {
        config,
        graph,
        weights,
        centers: &centers,
        kept: t0.mask(config.len()),
        half: m / 2.0,
        s: s_max,
    };
    let mut pending: BTreeSet<usize> = (0..config.len()).filter(|&i| !searcher.kept[i]).collect();
    let mut rounds = 0;
    let mut converged = true;
    while let Some(root) = pending.pop_first() {
        if searcher.kept[root] {
            continue;
        }
        let Some(swap) = searcher.best_piece(root) else { continue };
        if rounds == max_rounds {
            converged = false;
            break;
        }
        searcher.apply(&swap);
        rounds += 1;
        pending.extend(searcher.affected(&swap, 2 * s_max + 2));
    }
    let thinning = Thinning { kept: searcher.kept_ids(), source: Source::LocalImprove, hard_core: true };
    Ok(Improvement { thinning, rounds, converged })
}

/// Whether no valid swap with `|R|, |A| ≤ s_max` fits in a cube of side `m`
/// centered at any grain center.
pub fn is_locally_maximal(
    config: &Configuration,
    t: &Thinning,
    h: WeightSpec,
    m: f64,
    s_max: usize,
) -> Result<bool> {
    check_params(m, s_max)?;
    h.validate()?;
    if !t.hard_core {
        return Err(Error::NotHardCore);
    }
    let graph = build_contact_graph(config);
    let weights = WeightTable::new(config, h);
    let centers = SpatialGrid::for_grains(config);
    let searcher = Searcher {
        config,
        graph: &graph,
        weights: &weights,
        centers: &centers,
        kept: t.mask(config.len()),
        half: m / 2.0,
        s: s_max,
    };
    Ok((0..config.len()).all(|root| searcher.kept[root] || !searcher.has_valid_piece(root)))
}
