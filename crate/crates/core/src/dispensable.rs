//! Dispensable grains and the filtered configuration without them.
//!
//! A grain `K` is dispensable when some heavier grain `K'` overlaps it and
//! every grain disjoint from `K` is also disjoint from `K'`, that is
//! `N(K') ⊆ N(K) ∪ {K}` in the contact graph. Swapping `K` for `K'` then never
//! breaks the hard-core constraint, so no locally maximal thinning keeps `K`.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::graph::{build_contact_graph, ContactGraph};
use crate::model::{norm, Configuration, WindowKind};
use crate::weights::{WeightSpec, WeightTable};

/// Radius threshold separating small from large grains in the special list.
pub const SPECIAL_RADIUS: f64 = 1.05;
/// Most large grains a special dispensable grain may touch.
pub const SPECIAL_MAX_LARGE: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DispensabilityReport {
    pub id: usize,
    pub dispensable: bool,
    /// Heaviest grain certifying dispensability.
    pub witness: Option<usize>,
    /// Special list holds and the grain is dispensable.
    pub special: bool,
    /// Special list holds on its own, without the weight comparison.
    /// `special_list && !dispensable` exposes a grain the list accepts although
    /// no heavier witness exists.
    pub special_list: bool,
    /// On a free-ball window the witness may touch unseen grains outside it.
    pub boundary_affected: bool,
}

/// Which grains count in the neighbour conditions of the special list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SpecialParse {
    /// Neighbour conditions count every grain; only `K` and `K'` must be active.
    #[default]
    AllGrains,
    /// Neighbour conditions count active grains only.
    ActiveOnly,
}

impl SpecialParse {
    pub fn label(&self) -> &'static str {
        match self {
            SpecialParse::AllGrains => "all-grains",
            SpecialParse::ActiveOnly => "active-only",
        }
    }
}

/// Whether `N(w) ⊆ N(k) ∪ {k}`.
fn dominated(graph: &ContactGraph, k: usize, w: usize) -> bool {
    graph
        .neighbors(w)
        .iter()
        .all(|&j| j == k || graph.adjacent(k, j))
}

/// Precomputed state for repeated dispensability queries on one configuration.
pub struct Dispensability<'a> {
    config: &'a Configuration,
    graph: ContactGraph,
    weights: WeightTable,
}

impl<'a> Dispensability<'a> {
    pub fn new(config: &'a Configuration, h: WeightSpec) -> Result<Self> {
        h.validate()?;
        Ok(Dispensability {
            config,
            graph: build_contact_graph(config),
            weights: WeightTable::new(config, h),
        })
    }

    pub fn graph(&self) -> &ContactGraph {
        &self.graph
    }

    /// Heaviest overlapping `K'` with `h(K') > h(K)` and `N(K') ⊆ N(K) ∪ {K}`;
    /// equal weights go to the lower id.
    pub fn witness(&self, k: usize) -> Option<usize> {
        let lk = self.weights.log_weight(k);
        let mut best: Option<usize> = None;
        for &w in self.graph.neighbors(k) {
            let lw = self.weights.log_weight(w);
            if lw.total_cmp(&lk) != Ordering::Greater || !dominated(&self.graph, k, w) {
                continue;
            }
            match best {
                Some(b) if self.weights.log_weight(b) >= lw => {}
                _ => best = Some(w),
            }
        }
        best
    }

    fn boundary_affected(&self, w: usize) -> bool {
        match self.config.window().kind {
            WindowKind::Torus { .. } => false,
            WindowKind::FreeBall { radius } => {
                let g = &self.config.grains()[w];
                norm(&g.center, self.config.dim()) + g.radius + self.config.max_radius() > radius
            }
        }
    }

    pub fn report(&self, k: usize) -> Result<DispensabilityReport> {
        self.config.grain(k)?;
        let witness = self.witness(k);
        let special_list = self.config.grains().iter().all(|g| g.radius >= 1.0)
            && special_conditions(self.config, &self.graph, k, None, SpecialParse::AllGrains);
        Ok(DispensabilityReport {
            id: k,
            dispensable: witness.is_some(),
            witness,
            special: special_list && witness.is_some(),
            special_list,
            boundary_affected: witness.is_some_and(|w| self.boundary_affected(w)),
        })
    }

    /// Ids of all dispensable grains, ascending.
    pub fn dispensable_ids(&self) -> Vec<usize> {
        (0..self.config.len()).filter(|&k| self.witness(k).is_some()).collect()
    }
}

pub fn is_dispensable(k: usize, config: &Configuration, h: WeightSpec) -> Result<DispensabilityReport> {
    Dispensability::new(config, h)?.report(k)
}

fn check_radii(config: &Configuration) -> Result<()> {
    match config.grains().iter().find(|g| g.radius < 1.0) {
        Some(g) => Err(Error::RadiusLawMismatch(format!(
            "special dispensability needs radii in [1, m]; grain {} has radius {}",
            g.id, g.radius
        ))),
        None => Ok(()),
    }
}

/// The special list for grain `k`, with every grain taken as active.
pub fn is_special_dispensable(k: usize, config: &Configuration) -> Result<bool> {
    config.grain(k)?;
    check_radii(config)?;
    let graph = build_contact_graph(config);
    Ok(special_conditions(config, &graph, k, None, SpecialParse::AllGrains))
}

/// The special list: `K` and a witness `K'` are active, `r(K) < 1.05`,
/// `K ∩ K' ≠ ∅`, `K` meets no grain of radius below 1.05, at most three of
/// radius above 1.05, and every grain disjoint from `K` is disjoint from `K'`.
///
/// `active = None` treats every grain as active. Under
/// [`SpecialParse::ActiveOnly`] inactive grains are ignored by the two
/// counting conditions.
pub fn special_conditions(
    config: &Configuration,
    graph: &ContactGraph,
    k: usize,
    active: Option<&[bool]>,
    parse: SpecialParse,
) -> bool {
    let is_active = |i: usize| active.is_none_or(|a| a[i]);
    let grains = config.grains();
    if !is_active(k) || grains[k].radius >= SPECIAL_RADIUS {
        return false;
    }
    let counted = |j: usize| parse == SpecialParse::AllGrains || is_active(j);
    let mut large = 0;
    for &j in graph.neighbors(k) {
        if !counted(j) {
            continue;
        }
        let r = grains[j].radius;
        if r < SPECIAL_RADIUS {
            return false;
        }
        if r > SPECIAL_RADIUS {
            large += 1;
        }
    }
    if large > SPECIAL_MAX_LARGE {
        return false;
    }
    graph
        .neighbors(k)
        .iter()
        .any(|&w| is_active(w) && dominated(graph, k, w))
}

/// Configuration without its dispensable grains, judged once against the
/// original configuration, and the original ids of the grains kept.
pub fn remove_dispensable(config: &Configuration, h: WeightSpec) -> Result<(Configuration, Vec<usize>)> {
    let d = Dispensability::new(config, h)?;
    let drop = d.dispensable_ids();
    let kept: Vec<usize> = (0..config.len()).filter(|i| drop.binary_search(i).is_err()).collect();
    Ok((config.restrict(&kept), kept))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Window;

    fn free(balls: &[([f64; 2], f64)]) -> Configuration {
        let w = Window::free_ball(2, 10.0).unwrap();
        let b: Vec<_> = balls.iter().map(|&(c, r)| ([c[0], c[1], 0.0], r)).collect();
        Configuration::from_balls(w, &b).unwrap()
    }

    /// Five balls; the one at (0.4, 0) is dominated by the large ball at (-1, 0).
    fn five_balls() -> Configuration {
        free(&[
            ([2.1, -0.05], 1.024),
            ([-0.15, -1.0], 1.028),
            ([0.2, 1.0], 0.932),
            ([0.4, 0.0], 0.948),
            ([-1.0, 0.0], 1.594),
        ])
    }

    #[test]
    fn five_ball_fixture() {
        let c = five_balls();
        for k in 0..5 {
            let rep = is_dispensable(k, &c, WeightSpec::Volume).unwrap();
            assert_eq!(rep.dispensable, k == 3, "grain {k}");
        }
        let rep = is_dispensable(3, &c, WeightSpec::Volume).unwrap();
        assert_eq!(rep.witness, Some(4));
        assert!(!rep.boundary_affected);
        let (filtered, ids) = remove_dispensable(&c, WeightSpec::Volume).unwrap();
        assert_eq!(ids, vec![0, 1, 2, 4]);
        assert_eq!(filtered.len(), 4);
        assert_eq!(filtered.grains()[3].radius, 1.594);
    }

    #[test]
    fn isolated_grain_is_not_dispensable() {
        let c = free(&[([0.0, 0.0], 1.0), ([5.0, 0.0], 1.0)]);
        assert!(!is_dispensable(0, &c, WeightSpec::Volume).unwrap().dispensable);
        let (filtered, _) = remove_dispensable(&c, WeightSpec::Volume).unwrap();
        assert_eq!(filtered, c);
    }

    #[test]
    fn lighter_partner_is_no_witness() {
        let c = free(&[([0.0, 0.0], 1.0), ([1.0, 0.0], 1.2)]);
        assert!(is_dispensable(0, &c, WeightSpec::Volume).unwrap().dispensable);
        assert!(!is_dispensable(1, &c, WeightSpec::Volume).unwrap().dispensable);
    }

    #[test]
    fn witness_near_free_boundary_is_flagged() {
        let c = free(&[([8.0, 0.0], 1.0), ([9.0, 0.0], 1.2)]);
        let rep = is_dispensable(0, &c, WeightSpec::Volume).unwrap();
        assert!(rep.dispensable && rep.boundary_affected);
    }

    #[test]
    fn special_radius_gate() {
        let c = free(&[([0.0, 0.0], 1.06), ([1.5, 0.0], 1.08)]);
        assert!(!is_special_dispensable(0, &c).unwrap());
        assert!(is_special_dispensable(1, &c).is_ok());
    }

    #[test]
    fn special_small_neighbour_blocks() {
        let c = free(&[([0.0, 0.0], 1.02), ([1.5, 0.0], 1.03)]);
        assert!(!is_special_dispensable(0, &c).unwrap());
        let c = free(&[([0.0, 0.0], 1.02), ([1.5, 0.0], 1.08)]);
        assert!(is_special_dispensable(0, &c).unwrap());
    }

    #[test]
    fn special_large_neighbour_limit() {
        let mut balls = vec![([0.0, 0.0], 1.02)];
        for k in 0..4 {
            let t = std::f64::consts::FRAC_PI_2 * k as f64;
            balls.push(([2.0 * t.cos(), 2.0 * t.sin()], 1.08));
        }
        // Four large neighbours, one too many; each dominates through its overlaps with the centre only.
        let c = free(&balls);
        assert!(!is_special_dispensable(0, &c).unwrap());
        let c = free(&balls[..4]);
        assert!(is_special_dispensable(0, &c).unwrap());
    }

    #[test]
    fn special_needs_radii_at_least_one() {
        assert!(matches!(
            is_special_dispensable(0, &five_balls()),
            Err(Error::RadiusLawMismatch(_))
        ));
    }

    #[test]
    fn active_only_parse_ignores_inactive_neighbours() {
        let c = free(&[([0.0, 0.0], 1.02), ([1.5, 0.0], 1.08), ([-1.5, 0.0], 1.03)]);
        let g = build_contact_graph(&c);
        let active = [true, true, false];
        assert!(!special_conditions(&c, &g, 0, Some(&active), SpecialParse::AllGrains));
        assert!(special_conditions(&c, &g, 0, Some(&active), SpecialParse::ActiveOnly));
        // An inactive witness never certifies.
        let active = [true, false, false];
        assert!(!special_conditions(&c, &g, 0, Some(&active), SpecialParse::ActiveOnly));
    }
}
