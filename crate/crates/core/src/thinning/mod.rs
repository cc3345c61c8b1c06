//! Thinning constructions: Matérn I, per-component maxima, the cell-wise
//! lower and upper constructions over a tessellation, and swap search.

mod swap;
mod tessellation;

use std::cmp::Ordering;
use std::fmt;

use rand::seq::SliceRandom;

pub use swap::{
    find_valid_swap, is_locally_maximal, local_improve, swap_is_valid, Improvement, Swap,
    MAX_SWAP_SIZE,
};
pub use tessellation::{sample_voronoi, Tessellation};

use crate::error::Result;
use crate::graph::{build_contact_graph, ContactGraph};
use crate::model::Configuration;
use crate::mwis::MwisSolver;
use crate::rng::rng_from_seed;
use crate::spatial::SpatialGrid;
use crate::weights::{WeightSpec, WeightTable};

/// Algorithm that produced a thinning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Source {
    Empty,
    MaternOne,
    ComponentMax,
    ThinMinus,
    ThinPlus,
    LocalImprove,
    RandomMaximal,
    External,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Source::Empty => "empty",
            Source::MaternOne => "matern-one",
            Source::ComponentMax => "component-max",
            Source::ThinMinus => "thin-minus",
            Source::ThinPlus => "thin-plus",
            Source::LocalImprove => "local-improve",
            Source::RandomMaximal => "random-maximal",
            Source::External => "external",
        };
        f.write_str(s)
    }
}

/// A subset of the grains of one configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Thinning {
    pub kept: Vec<usize>,
    pub source: Source,
    pub hard_core: bool,
}

impl Thinning {
    /// Wraps `kept` and determines the hard-core flag by an overlap scan.
    pub fn new(config: &Configuration, kept: Vec<usize>, source: Source) -> Self {
        let mut kept = kept;
        kept.sort_unstable();
        kept.dedup();
        let hard_core = is_hard_core(config, &kept);
        Thinning { kept, source, hard_core }
    }

    pub fn empty() -> Self {
        Thinning { kept: Vec::new(), source: Source::Empty, hard_core: true }
    }

    pub fn contains(&self, id: usize) -> bool {
        self.kept.binary_search(&id).is_ok()
    }

    pub fn len(&self) -> usize {
        self.kept.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kept.is_empty()
    }

    pub fn total_weight(&self, weights: &WeightTable) -> f64 {
        weights.total(&self.kept)
    }

    /// Membership mask over all grains of the configuration.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &i in &self.kept {
            m[i] = true;
        }
        m
    }
}

/// Whether no two of the given grains have overlapping interiors.
pub fn is_hard_core(config: &Configuration, ids: &[usize]) -> bool {
    if ids.len() < 2 {
        return true;
    }
    let window = config.window();
    let grains = config.grains();
    let sub_max = ids.iter().map(|&i| grains[i].radius).fold(0.0, f64::max);
    let grid = SpatialGrid::new(window, ids.iter().map(|&i| (i, grains[i].center)), 2.0 * sub_max);
    ids.iter().all(|&i| {
        let mut ok = true;
        grid.visit(&grains[i].center, grains[i].radius + sub_max, |j| {
            if j != i && config.overlap(i, j) {
                ok = false;
            }
        });
        ok
    })
}

/// Grains overlapping no other grain.
pub fn matern_one(config: &Configuration) -> Thinning {
    matern_one_with(&build_contact_graph(config))
}

pub fn matern_one_with(graph: &ContactGraph) -> Thinning {
    let kept = (0..graph.len()).filter(|&i| graph.degree(i) == 0).collect();
    Thinning { kept, source: Source::MaternOne, hard_core: true }
}

/// Exact `h`-maximal hard-core subset of every connected component.
pub fn component_max(config: &Configuration, h: WeightSpec, cap: usize) -> Result<Thinning> {
    h.validate()?;
    let graph = build_contact_graph(config);
    let weights = WeightTable::new(config, h);
    component_max_with(config, &graph, &weights, cap)
}

pub fn component_max_with(
    config: &Configuration,
    graph: &ContactGraph,
    weights: &WeightTable,
    cap: usize,
) -> Result<Thinning> {
    let all: Vec<usize> = (0..config.len()).collect();
    let result = MwisSolver::new(config, graph, weights).solve(&all, cap)?;
    Ok(Thinning { kept: result.chosen, source: Source::ComponentMax, hard_core: true })
}

/// Greedy maximal hard-core subset in a uniformly random order.
pub fn random_maximal(config: &Configuration, seed: u64) -> Thinning {
    let graph = build_contact_graph(config);
    let mut order: Vec<usize> = (0..config.len()).collect();
    order.shuffle(&mut rng_from_seed(seed));
    let mut blocked = vec![false; config.len()];
    let mut kept = Vec::new();
    for i in order {
        if !blocked[i] {
            kept.push(i);
            blocked[i] = true;
            for &j in graph.neighbors(i) {
                blocked[j] = true;
            }
        }
    }
    kept.sort_unstable();
    Thinning { kept, source: Source::RandomMaximal, hard_core: true }
}

/// Cell of every grain center and whether the whole ball lies in that cell.
#[derive(Debug, Clone)]
pub struct CellAssignment {
    pub cell: Vec<usize>,
    pub contained: Vec<bool>,
    pub cells: usize,
}

impl CellAssignment {
    pub fn new(config: &Configuration, tess: &Tessellation) -> Self {
        let (cell, contained) = config
            .grains()
            .iter()
            .map(|g| {
                let c = tess.cell_of(&g.center);
                (c, tess.contains_ball(c, &g.center, g.radius))
            })
            .unzip();
        CellAssignment { cell, contained, cells: tess.len() }
    }

    /// Grain ids per cell, optionally only those fully inside their cell.
    pub fn members(&self, contained_only: bool) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.cells];
        for (i, &c) in self.cell.iter().enumerate() {
            if !contained_only || self.contained[i] {
                out[c].push(i);
            }
        }
        out
    }
}

/// Per-cell exact maxima, either over grains contained in the cell (lower
/// construction) or over grains centered in the cell (upper construction).
fn cellwise_max(
    config: &Configuration,
    graph: &ContactGraph,
    weights: &WeightTable,
    cells: &CellAssignment,
    contained_only: bool,
    cap: usize,
) -> Result<Vec<Vec<usize>>> {
    let solver = MwisSolver::new(config, graph, weights);
    cells
        .members(contained_only)
        .iter()
        .map(|ids| {
            if ids.is_empty() {
                Ok(Vec::new())
            } else {
                solver.solve(ids, cap).map(|r| r.chosen)
            }
        })
        .collect()
}

/// Union over cells of the maximal hard-core subsets of the grains lying
/// entirely inside each cell. Always hard-core.
pub fn thin_minus(
    config: &Configuration,
    tess: &Tessellation,
    h: WeightSpec,
    cap: usize,
) -> Result<Thinning> {
    h.validate()?;
    let graph = build_contact_graph(config);
    let weights = WeightTable::new(config, h);
    let cells = CellAssignment::new(config, tess);
    thin_minus_with(config, &graph, &weights, &cells, cap)
}

pub fn thin_minus_with(
    config: &Configuration,
    graph: &ContactGraph,
    weights: &WeightTable,
    cells: &CellAssignment,
    cap: usize,
) -> Result<Thinning> {
    let per_cell = cellwise_max(config, graph, weights, cells, true, cap)?;
    let kept = per_cell.into_iter().flatten().collect();
    let mut t = Thinning { kept, source: Source::ThinMinus, hard_core: true };
    t.kept.sort_unstable();
    Ok(t)
}

/// Union over cells of the maximal hard-core subsets of the grains centered
/// in each cell. Grains of different cells may overlap.
pub fn thin_plus(
    config: &Configuration,
    tess: &Tessellation,
    h: WeightSpec,
    cap: usize,
) -> Result<Thinning> {
    h.validate()?;
    let graph = build_contact_graph(config);
    let weights = WeightTable::new(config, h);
    let cells = CellAssignment::new(config, tess);
    thin_plus_with(config, &graph, &weights, &cells, cap)
}

pub fn thin_plus_with(
    config: &Configuration,
    graph: &ContactGraph,
    weights: &WeightTable,
    cells: &CellAssignment,
    cap: usize,
) -> Result<Thinning> {
    let per_cell = cellwise_max(config, graph, weights, cells, false, cap)?;
    let kept: Vec<usize> = per_cell.into_iter().flatten().collect();
    Ok(Thinning::new(config, kept, Source::ThinPlus))
}

/// Weight bookkeeping of one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSlack {
    pub cell: usize,
    /// `Σh` of the upper construction restricted to the cell.
    pub plus: f64,
    /// `Σh` of the lower construction restricted to the cell.
    pub minus: f64,
    /// `Σh` over grains centered in the cell that cross its boundary.
    pub boundary: f64,
    /// `boundary - (plus - minus)`; non-negative when the bound holds.
    pub slack: f64,
    /// Exact (log-domain) verdict of `plus <= minus + boundary`.
    pub holds: bool,
    /// `Σh` of the supplied thinning over grains centered in the cell.
    pub thinning: f64,
    /// Exact verdict of `thinning <= plus`.
    pub thinning_below_plus: bool,
}

/// Cube inequality for a thinning `t`: the lower construction's grains inside
/// `[-m/2, m/2]^d` weigh no more than the grains of `t` hitting that cube.
#[derive(Debug, Clone, PartialEq)]
pub struct CubeInequality {
    pub m: f64,
    pub inside_minus: f64,
    pub hitting_thinning: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowReport {
    pub cells: Vec<CellSlack>,
    pub violations: usize,
    pub thinning_violations: usize,
    pub cube: CubeInequality,
}

/// Verifies the cell-wise surface bound for the lower and upper
/// constructions, the upper bound on `t` inside every cell, and the cube
/// inequality for `t` at side `m`.
pub fn window_inequality_check(
    config: &Configuration,
    t: &Thinning,
    tess: &Tessellation,
    h: WeightSpec,
    m: f64,
    cap: usize,
) -> Result<WindowReport> {
    h.validate()?;
    let graph = build_contact_graph(config);
    let weights = WeightTable::new(config, h);
    let cells = CellAssignment::new(config, tess);
    let minus = cellwise_max(config, &graph, &weights, &cells, true, cap)?;
    let plus = cellwise_max(config, &graph, &weights, &cells, false, cap)?;
    Ok(window_report_from(config, &weights, &cells, &minus, &plus, t, m))
}

/// Lower and upper constructions of one tessellation with the report for `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sandwich {
    pub minus: Thinning,
    pub plus: Thinning,
    pub report: WindowReport,
}

/// [`thin_minus`], [`thin_plus`] and [`window_inequality_check`] sharing
/// one set of per-cell solves.
pub fn sandwich(
    config: &Configuration,
    t: &Thinning,
    tess: &Tessellation,
    h: WeightSpec,
    m: f64,
    cap: usize,
) -> Result<Sandwich> {
    h.validate()?;
    let graph = build_contact_graph(config);
    let weights = WeightTable::new(config, h);
    sandwich_with(config, &graph, &weights, t, tess, m, cap)
}

pub fn sandwich_with(
    config: &Configuration,
    graph: &ContactGraph,
    weights: &WeightTable,
    t: &Thinning,
    tess: &Tessellation,
    m: f64,
    cap: usize,
) -> Result<Sandwich> {
    let cells = CellAssignment::new(config, tess);
    let minus = cellwise_max(config, graph, weights, &cells, true, cap)?;
    let plus = cellwise_max(config, graph, weights, &cells, false, cap)?;
    let report = window_report_from(config, weights, &cells, &minus, &plus, t, m);
    let mut lower: Vec<usize> = minus.into_iter().flatten().collect();
    lower.sort_unstable();
    Ok(Sandwich {
        minus: Thinning { kept: lower, source: Source::ThinMinus, hard_core: true },
        plus: Thinning::new(config, plus.into_iter().flatten().collect(), Source::ThinPlus),
        report,
    })
}

/// Report from precomputed per-cell solutions.
pub fn window_report_from(
    config: &Configuration,
    weights: &WeightTable,
    cells: &CellAssignment,
    minus: &[Vec<usize>],
    plus: &[Vec<usize>],
    t: &Thinning,
    m: f64,
) -> WindowReport {
    let mut boundary = vec![Vec::new(); cells.cells];
    for (i, &c) in cells.cell.iter().enumerate() {
        if !cells.contained[i] {
            boundary[c].push(i);
        }
    }
    let mut thinning = vec![Vec::new(); cells.cells];
    for &i in &t.kept {
        thinning[cells.cell[i]].push(i);
    }
    let mut report_cells = Vec::with_capacity(cells.cells);
    for c in 0..cells.cells {
        let rhs: Vec<usize> = minus[c].iter().chain(&boundary[c]).copied().collect();
        let holds = weights.compare_totals(&plus[c], &rhs) != Ordering::Greater;
        let below = weights.compare_totals(&thinning[c], &plus[c]) != Ordering::Greater;
        let (p, mi, b) = (weights.total(&plus[c]), weights.total(&minus[c]), weights.total(&boundary[c]));
        report_cells.push(CellSlack {
            cell: c,
            plus: p,
            minus: mi,
            boundary: b,
            slack: b - (p - mi),
            holds,
            thinning: weights.total(&thinning[c]),
            thinning_below_plus: below,
        });
    }
    let violations = report_cells.iter().filter(|c| !c.holds).count();
    let thinning_violations = report_cells.iter().filter(|c| !c.thinning_below_plus).count();

    let dim = config.dim();
    let half = m / 2.0;
    let grains = config.grains();
    let inside: Vec<usize> = minus
        .iter()
        .flatten()
        .copied()
        .filter(|&i| {
            let g = &grains[i];
            (0..dim).all(|k| g.center[k].abs() + g.radius <= half)
        })
        .collect();
    let hitting: Vec<usize> = t
        .kept
        .iter()
        .copied()
        .filter(|&i| {
            let g = &grains[i];
            let gap2: f64 = (0..dim).map(|k| (g.center[k].abs() - half).max(0.0).powi(2)).sum();
            gap2 <= g.radius * g.radius
        })
        .collect();
    let cube = CubeInequality {
        m,
        inside_minus: weights.total(&inside),
        hitting_thinning: weights.total(&hitting),
        holds: weights.compare_totals(&inside, &hitting) != Ordering::Greater,
    };
    WindowReport { cells: report_cells, violations, thinning_violations, cube }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{sample_poisson, RadiusLaw, Window};
    use crate::mwis::{brute_force, DEFAULT_CAP};

    fn config(balls: &[([f64; 2], f64)]) -> Configuration {
        let w = Window::torus(2, 20.0).unwrap();
        let b: Vec<_> = balls.iter().map(|&(c, r)| ([c[0], c[1], 0.0], r)).collect();
        Configuration::from_balls(w, &b).unwrap()
    }

    fn random(seed: u64, intensity: f64) -> Configuration {
        sample_poisson(
            intensity,
            RadiusLaw::Uniform { lo: 0.3, hi: 0.5 },
            Window::torus(2, 12.0).unwrap(),
            seed,
        )
        .unwrap()
    }

    #[test]
    fn matern_keeps_isolated_grains() {
        let c = config(&[([0.0, 0.0], 0.5), ([3.0, 0.0], 0.5), ([-3.0, 3.0], 0.5)]);
        assert_eq!(matern_one(&c).kept, vec![0, 1, 2]);
        let c = config(&[([0.0, 0.0], 0.5), ([0.8, 0.0], 0.5)]);
        assert!(matern_one(&c).kept.is_empty());
    }

    #[test]
    fn component_max_on_isolated_and_pairs() {
        let c = config(&[([0.0, 0.0], 0.5), ([3.0, 0.0], 0.5)]);
        assert_eq!(component_max(&c, WeightSpec::Volume, DEFAULT_CAP).unwrap().kept, vec![0, 1]);
        let r1 = (1.0 / std::f64::consts::PI).sqrt();
        let r2 = (2.0 / std::f64::consts::PI).sqrt();
        let c = config(&[([0.0, 0.0], r1), ([1.0, 0.0], r2)]);
        assert_eq!(component_max(&c, WeightSpec::Volume, DEFAULT_CAP).unwrap().kept, vec![1]);
    }

    #[test]
    fn component_max_matches_brute_force_per_component() {
        for seed in 0..20 {
            let c = random(seed, 0.6);
            let graph = build_contact_graph(&c);
            let cm = component_max(&c, WeightSpec::Volume, DEFAULT_CAP).unwrap();
            let mut oracle = Vec::new();
            for comp in crate::graph::connected_components(&graph) {
                if comp.len() > 15 {
                    continue;
                }
                oracle.extend(brute_force(&comp, &c, WeightSpec::Volume).unwrap().chosen);
                let expected: Vec<usize> = brute_force(&comp, &c, WeightSpec::Volume).unwrap().chosen;
                let got: Vec<usize> = cm.kept.iter().copied().filter(|i| comp.contains(i)).collect();
                assert_eq!(got, expected, "seed {seed}");
            }
        }
    }

    #[test]
    fn single_cell_constructions_equal_component_max() {
        for seed in 0..10 {
            let c = random(seed, 1.0);
            let tess = Tessellation::new(*c.window(), vec![[0.0; 3]]).unwrap();
            let cm = component_max(&c, WeightSpec::Volume, DEFAULT_CAP).unwrap();
            assert_eq!(thin_minus(&c, &tess, WeightSpec::Volume, DEFAULT_CAP).unwrap().kept, cm.kept);
            let plus = thin_plus(&c, &tess, WeightSpec::Volume, DEFAULT_CAP).unwrap();
            assert_eq!(plus.kept, cm.kept);
            assert!(plus.hard_core);
        }
    }

    #[test]
    fn straddling_grain_is_excluded_from_lower_construction() {
        let c = config(&[([-0.2, 0.0], 0.5), ([-5.0, 0.0], 0.5)]);
        let tess =
            Tessellation::new(*c.window(), vec![[-5.0, 0.0, 0.0], [5.0, 0.0, 0.0]]).unwrap();
        let minus = thin_minus(&c, &tess, WeightSpec::Volume, DEFAULT_CAP).unwrap();
        assert_eq!(minus.kept, vec![1]);
        let plus = thin_plus(&c, &tess, WeightSpec::Volume, DEFAULT_CAP).unwrap();
        assert_eq!(plus.kept, vec![0, 1]);
    }

    #[test]
    fn cross_cell_overlap_allowed_in_upper_construction() {
        let c = config(&[([-0.3, 0.0], 0.5), ([0.3, 0.0], 0.5)]);
        let tess =
            Tessellation::new(*c.window(), vec![[-5.0, 0.0, 0.0], [5.0, 0.0, 0.0]]).unwrap();
        let plus = thin_plus(&c, &tess, WeightSpec::Volume, DEFAULT_CAP).unwrap();
        assert_eq!(plus.kept, vec![0, 1]);
        assert!(!plus.hard_core);
    }

    #[test]
    fn lower_construction_matches_per_cell_brute_force() {
        for seed in 0..10 {
            let c = random(seed, 0.8);
            let tess = Tessellation::new(
                *c.window(),
                vec![[-3.0, -3.0, 0.0], [3.0, -3.0, 0.0], [-3.0, 3.0, 0.0], [3.1, 2.9, 0.0]],
            )
            .unwrap();
            let cells = CellAssignment::new(&c, &tess);
            let minus = thin_minus(&c, &tess, WeightSpec::Volume, DEFAULT_CAP).unwrap();
            for members in cells.members(true) {
                let graph = build_contact_graph(&c);
                for comp in graph.induced_components(&members) {
                    if comp.len() > 15 {
                        continue;
                    }
                    let expected = brute_force(&comp, &c, WeightSpec::Volume).unwrap().chosen;
                    let got: Vec<usize> =
                        minus.kept.iter().copied().filter(|i| comp.contains(i)).collect();
                    assert_eq!(got, expected);
                }
            }
            // Nothing outside the contained set is ever kept.
            assert!(minus.kept.iter().all(|&i| cells.contained[i]));
        }
    }

    #[test]
    fn surface_bound_holds_and_is_tight_without_crossings() {
        for seed in 0..15 {
            let c = random(seed, 1.0);
            let tess = sample_voronoi(*c.window(), 0.1, seed + 100).unwrap();
            let t = component_max(&c, WeightSpec::Volume, DEFAULT_CAP).unwrap();
            let rep =
                window_inequality_check(&c, &t, &tess, WeightSpec::Volume, 6.0, DEFAULT_CAP).unwrap();
            assert_eq!(rep.violations, 0);
            assert_eq!(rep.thinning_violations, 0);
            assert!(rep.cube.holds);
            for cell in &rep.cells {
                assert!(cell.slack >= -1e-9);
                if cell.boundary == 0.0 {
                    assert_eq!(cell.plus, cell.minus);
                }
            }
        }
    }

    #[test]
    fn single_cell_report_has_zero_gap() {
        let c = random(3, 1.0);
        let tess = Tessellation::new(*c.window(), vec![[0.0; 3]]).unwrap();
        let t = Thinning::empty();
        let rep = window_inequality_check(&c, &t, &tess, WeightSpec::Volume, 4.0, DEFAULT_CAP).unwrap();
        assert_eq!(rep.cells.len(), 1);
        assert_eq!(rep.cells[0].plus - rep.cells[0].minus, 0.0);
        assert_eq!(rep.cells[0].boundary, 0.0);
    }

    #[test]
    fn random_maximal_is_maximal_and_hard_core() {
        let c = random(4, 1.0);
        let t = random_maximal(&c, 9);
        assert!(is_hard_core(&c, &t.kept));
        let graph = build_contact_graph(&c);
        for i in 0..c.len() {
            if !t.contains(i) {
                assert!(graph.neighbors(i).iter().any(|&j| t.contains(j)));
            }
        }
    }
}
