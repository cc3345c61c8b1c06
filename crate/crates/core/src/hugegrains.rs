//! Huge grains, good lattice sites and the shield check.
//!
//! Weights here are `h_a(B_r(x)) = exp(a r)`; every comparison works on the
//! exponents `a r` so that `a` in the thousands stays exact.

use crate::error::{Error, Result};
use crate::graph::{build_contact_graph, build_directed_graph, ContactGraph, DirectedGraph};
use crate::model::{norm, Configuration, Point, WindowKind};
use crate::thinning::Thinning;
use crate::weights::log_sum_exp;

type SiteFilter = Box<dyn Fn(&[i64; 3]) -> bool>;

fn check_exponent(a: f64) -> Result<()> {
    if a.is_finite() && a >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("weight exponent must be at least 1, got {a}")))
    }
}

/// `exp(a r_k) > Σ exp(a r_j)` over overlapping `j` with `r_j < r_k`.
pub fn is_a_huge(k: usize, config: &Configuration, a: f64) -> Result<bool> {
    check_exponent(a)?;
    config.grain(k)?;
    Ok(huge_with(&build_contact_graph(config), config, k, a))
}

fn huge_with(graph: &ContactGraph, config: &Configuration, k: usize, a: f64) -> bool {
    let grains = config.grains();
    let own = a * grains[k].radius;
    let mut lighter: Vec<f64> = graph
        .neighbors(k)
        .iter()
        .map(|&j| a * grains[j].radius)
        .filter(|&e| e < own)
        .collect();
    own > log_sum_exp(&mut lighter)
}

/// Huge flags of every grain.
pub fn huge_flags(config: &Configuration, graph: &ContactGraph, a: f64) -> Result<Vec<bool>> {
    check_exponent(a)?;
    Ok((0..config.len()).map(|k| huge_with(graph, config, k, a)).collect())
}

/// `h_{a^{2d}}` exponent for lattice scale `a`.
pub fn shield_exponent(a: u32, dim: usize) -> f64 {
    f64::from(a).powi(2 * dim as i32)
}

/// Whether every ball of `ids` lies in the cube of side `side` centered at `p`.
fn balls_in_cube(config: &Configuration, p: &Point, side: f64, ids: &[usize]) -> bool {
    let window = config.window();
    let dim = config.dim();
    let half = side / 2.0;
    ids.iter().all(|&i| {
        let g = &config.grains()[i];
        let d = window.displacement(p, &g.center);
        d[..dim].iter().all(|x| x.abs() + g.radius <= half)
    })
}

fn center_in_cube(config: &Configuration, p: &Point, side: f64, x: &Point) -> bool {
    let d = config.window().displacement(p, x);
    d[..config.dim()].iter().all(|v| v.abs() <= side / 2.0)
}

/// Lattice sites `z` on the box `{-k..=k}^d`; a site is valid when
/// `Q_{3a}(az)` fits in the window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoodSiteGrid {
    pub a: u32,
    pub dim: usize,
    /// Sites per axis run over `-reach..=reach`.
    pub reach: i64,
    pub valid: Vec<bool>,
    pub good: Vec<bool>,
}

impl GoodSiteGrid {
    fn side(&self) -> usize {
        (2 * self.reach + 1) as usize
    }

    fn index(&self, z: &[i64; 3]) -> Option<usize> {
        let side = self.side() as i64;
        let mut idx = 0i64;
        for k in (0..self.dim).rev() {
            let c = z[k] + self.reach;
            if !(0..side).contains(&c) {
                return None;
            }
            idx = idx * side + c;
        }
        Some(idx as usize)
    }

    fn coords(&self, mut idx: usize) -> [i64; 3] {
        let side = self.side();
        let mut z = [0i64; 3];
        for v in z.iter_mut().take(self.dim) {
            *v = (idx % side) as i64 - self.reach;
            idx /= side;
        }
        z
    }

    /// Center `a z` of site `idx`.
    pub fn site_center(&self, idx: usize) -> Point {
        let z = self.coords(idx);
        let mut p = [0.0; 3];
        for k in 0..self.dim {
            p[k] = f64::from(self.a) * z[k] as f64;
        }
        p
    }

    /// Valid site whose cube `Q_a(az)` holds `p`.
    pub fn site_of(&self, p: &Point) -> Option<usize> {
        let mut z = [0i64; 3];
        for k in 0..self.dim {
            z[k] = (p[k] / f64::from(self.a)).round() as i64;
        }
        self.index(&z).filter(|&i| self.valid[i])
    }

    pub fn site_count(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }

    pub fn good_count(&self) -> usize {
        self.good.iter().zip(&self.valid).filter(|(g, v)| **g && **v).count()
    }

    pub fn good_fraction(&self) -> f64 {
        match self.site_count() {
            0 => 0.0,
            n => self.good_count() as f64 / n as f64,
        }
    }

    /// Sites shielded from the outside: good sites, and non-good sites that no
    /// face-adjacent path of non-good valid sites connects to an invalid or
    /// out-of-box site.
    pub fn shielded_sites(&self) -> Vec<bool> {
        let n = self.valid.len();
        let mut escaped = vec![false; n];
        let mut stack = Vec::new();
        for (i, e) in escaped.iter_mut().enumerate() {
            if self.valid[i] && !self.good[i] && self.touches_outside(i) {
                *e = true;
                stack.push(i);
            }
        }
        while let Some(i) = stack.pop() {
            for j in self.face_neighbors(i).into_iter().flatten() {
                if self.valid[j] && !self.good[j] && !escaped[j] {
                    escaped[j] = true;
                    stack.push(j);
                }
            }
        }
        (0..n).map(|i| self.valid[i] && !escaped[i]).collect()
    }

    fn face_neighbors(&self, i: usize) -> Vec<Option<usize>> {
        let z = self.coords(i);
        let mut out = Vec::with_capacity(2 * self.dim);
        for k in 0..self.dim {
            for step in [-1, 1] {
                let mut w = z;
                w[k] += step;
                out.push(self.index(&w));
            }
        }
        out
    }

    fn touches_outside(&self, i: usize) -> bool {
        self.face_neighbors(i).into_iter().any(|j| j.is_none_or(|j| !self.valid[j]))
    }
}

/// Good-site grid for lattice scale `a`: site `z` is good when every grain
/// centered in `Q_{3a}(az)` is `a^{2d}`-huge and every grain centered in
/// `Q_a(az)` has its whole cluster inside `Q_{3a}(az)`.
pub fn good_site_grid(config: &Configuration, a: u32) -> Result<GoodSiteGrid> {
    if a == 0 {
        return Err(Error::InvalidParameter("lattice scale a must be at least 1".into()));
    }
    let graph = build_contact_graph(config);
    let directed = build_directed_graph(config);
    let huge = huge_flags(config, &graph, shield_exponent(a, config.dim()))?;
    good_site_grid_with(config, &directed, &huge, a)
}

pub fn good_site_grid_with(
    config: &Configuration,
    directed: &DirectedGraph,
    huge: &[bool],
    a: u32,
) -> Result<GoodSiteGrid> {
    let dim = config.dim();
    let af = f64::from(a);
    let (reach, fits): (i64, SiteFilter) = match config.window().kind {
        WindowKind::Torus { side } => {
            let reach = ((side / 2.0 - 1.5 * af) / af + 1e-9).floor() as i64;
            (reach, Box::new(|_| true))
        }
        WindowKind::FreeBall { radius } => {
            let reach = ((radius - 1.5 * af) / af + 1e-9).floor() as i64;
            let half_diag = 1.5 * af * (dim as f64).sqrt();
            (
                reach,
                Box::new(move |z: &[i64; 3]| {
                    let mut p = [0.0; 3];
                    for k in 0..dim {
                        p[k] = af * z[k] as f64;
                    }
                    norm(&p, dim) + half_diag <= radius
                }),
            )
        }
    };
    if reach < 0 {
        return Err(Error::WindowTooSmall(format!("no cube of side {} fits in the window", 3 * a)));
    }
    let count = ((2 * reach + 1) as usize).pow(dim as u32);
    let mut grid = GoodSiteGrid { a, dim, reach, valid: vec![false; count], good: vec![false; count] };
    for i in 0..count {
        let z = grid.coords(i);
        grid.valid[i] = fits(&z);
    }
    if grid.site_count() == 0 {
        return Err(Error::WindowTooSmall(format!("no cube of side {} fits in the window", 3 * a)));
    }
    let big = 3.0 * af;
    for i in 0..count {
        if !grid.valid[i] {
            continue;
        }
        let c = grid.site_center(i);
        let mut good = true;
        for g in config.grains() {
            if !center_in_cube(config, &c, big, &g.center) {
                continue;
            }
            if !huge[g.id] {
                good = false;
                break;
            }
            if center_in_cube(config, &c, af, &g.center)
                && !cluster_in_cube(config, directed, g.id, &c, big)
            {
                good = false;
                break;
            }
        }
        grid.good[i] = good;
    }
    Ok(grid)
}

/// Whether every ball reachable from `k` lies in the cube; stops at the first escape.
fn cluster_in_cube(
    config: &Configuration,
    directed: &DirectedGraph,
    k: usize,
    c: &Point,
    side: f64,
) -> bool {
    let mut seen = std::collections::HashSet::new();
    let mut stack = vec![k];
    seen.insert(k);
    while let Some(i) = stack.pop() {
        if !balls_in_cube(config, c, side, &[i]) {
            return false;
        }
        for &j in directed.successors(i) {
            if seen.insert(j) {
                stack.push(j);
            }
        }
    }
    true
}

/// Components of the contact graph restricted to `kept(t1) Δ kept(t2)`.
pub fn disagreement_components(config: &Configuration, t1: &Thinning, t2: &Thinning) -> Vec<Vec<usize>> {
    let graph = build_contact_graph(config);
    disagreement_with(&graph, t1, t2)
}

pub fn disagreement_with(graph: &ContactGraph, t1: &Thinning, t2: &Thinning) -> Vec<Vec<usize>> {
    let diff = symmetric_difference(&t1.kept, &t2.kept);
    graph.induced_components(&diff)
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = a.iter().filter(|x| b.binary_search(x).is_err()).copied().collect();
    out.extend(b.iter().filter(|x| a.binary_search(x).is_err()));
    out.sort_unstable();
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ShieldReport {
    /// Grains centered in a good site.
    pub in_good: usize,
    /// Grains centered in a non-good site enclosed by good sites.
    pub enclosed: usize,
    /// Shielded grains kept by exactly one of the two thinnings.
    pub violations: Vec<usize>,
    /// Disagreement components containing a violation.
    pub offending: Vec<Vec<usize>>,
}

impl ShieldReport {
    pub fn protected(&self) -> usize {
        self.in_good + self.enclosed
    }

    pub fn no_enclosed(&self) -> bool {
        self.protected() == 0
    }
}

/// Checks that no shielded grain is kept by exactly one of `t1`, `t2`.
pub fn shield_check(
    config: &Configuration,
    grid: &GoodSiteGrid,
    t1: &Thinning,
    t2: &Thinning,
    a: u32,
) -> Result<ShieldReport> {
    if a != grid.a {
        return Err(Error::InvalidParameter(format!(
            "grid was built for a = {}, got a = {a}",
            grid.a
        )));
    }
    let shielded = grid.shielded_sites();
    let diff = symmetric_difference(&t1.kept, &t2.kept);
    let mut report = ShieldReport::default();
    for g in config.grains() {
        let Some(site) = grid.site_of(&g.center) else { continue };
        if !shielded[site] {
            continue;
        }
        if grid.good[site] {
            report.in_good += 1;
        } else {
            report.enclosed += 1;
        }
        if diff.binary_search(&g.id).is_ok() {
            report.violations.push(g.id);
        }
    }
    if !report.violations.is_empty() {
        let graph = build_contact_graph(config);
        report.offending = graph
            .induced_components(&diff)
            .into_iter()
            .filter(|c| c.iter().any(|i| report.violations.binary_search(i).is_ok()))
            .collect();
    }
    Ok(report)
}

/// Fraction of grains centered in `Q_{3a}(o)` that are `a^{2d}`-huge, with the
/// number of such grains. `None` when the cube holds no center.
pub fn huge_fraction_at_origin(config: &Configuration, a: u32) -> Result<(Option<f64>, usize)> {
    let graph = build_contact_graph(config);
    let huge = huge_flags(config, &graph, shield_exponent(a, config.dim()))?;
    Ok(huge_fraction_with(config, &huge, a))
}

pub fn huge_fraction_with(config: &Configuration, huge: &[bool], a: u32) -> (Option<f64>, usize) {
    let side = 3.0 * f64::from(a);
    let origin = [0.0; 3];
    let inside: Vec<usize> = config
        .grains()
        .iter()
        .filter(|g| center_in_cube(config, &origin, side, &g.center))
        .map(|g| g.id)
        .collect();
    if inside.is_empty() {
        return (None, 0);
    }
    let count = inside.iter().filter(|&&i| huge[i]).count();
    (Some(count as f64 / inside.len() as f64), inside.len())
}
