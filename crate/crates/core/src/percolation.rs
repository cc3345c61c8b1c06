//! Two-parameter colored continuum percolation on a free ball `B_n(o)`.
//!
//! Every grain carries two uniform marks. A grain is red when its activation
//! mark is at least `p` and active otherwise; an active special dispensable
//! grain turns green when its green mark is at least `q`. Active grains that
//! are not green are uncolored. Fixing the marks couples all `(p, q)` values.

use std::collections::VecDeque;

use rand::Rng;

use crate::dispensable::{special_conditions, SpecialParse};
use crate::error::{Error, Result};
use crate::graph::{build_contact_graph, ContactGraph};
use crate::model::{norm, sample_poisson, Configuration, RadiusLaw, Window, WindowKind};
use crate::rng::{derive_seed, rng_from_seed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Color {
    Red,
    Green,
    Uncolored,
}

/// Per-grain uniform marks shared across parameter values.
#[derive(Debug, Clone, PartialEq)]
pub struct Marks {
    pub activation: Vec<f64>,
    pub green: Vec<f64>,
}

impl Marks {
    pub fn draw(count: usize, seed: u64) -> Self {
        let mut rng = rng_from_seed(seed);
        let activation = (0..count).map(|_| rng.random::<f64>()).collect();
        let green = (0..count).map(|_| rng.random::<f64>()).collect();
        Marks { activation, green }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColoredConfiguration {
    pub base: Configuration,
    pub color: Vec<Color>,
    pub activation_marks: Vec<f64>,
    pub green_marks: Vec<f64>,
    /// Active grains meeting the special dispensable list.
    pub special: Vec<bool>,
    pub parse: SpecialParse,
}

impl ColoredConfiguration {
    pub fn uncolored(&self) -> Vec<bool> {
        self.color.iter().map(|&c| c == Color::Uncolored).collect()
    }
}

fn check_probability(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must lie in [0, 1], got {v}")))
    }
}

fn check_free_ball(config: &Configuration) -> Result<f64> {
    match config.window().kind {
        WindowKind::FreeBall { radius } => Ok(radius),
        WindowKind::Torus { .. } => {
            Err(Error::InvalidWindow("colored percolation runs on a free-ball window".into()))
        }
    }
}

fn check_radii(config: &Configuration) -> Result<()> {
    match config.grains().iter().find(|g| g.radius < 1.0) {
        Some(g) => Err(Error::RadiusLawMismatch(format!(
            "coloring needs radii in [1, m]; grain {} has radius {}",
            g.id, g.radius
        ))),
        None => Ok(()),
    }
}

/// Colors `config` with freshly drawn marks.
pub fn color(config: &Configuration, p: f64, q: f64, seed: u64) -> Result<ColoredConfiguration> {
    let marks = Marks::draw(config.len(), seed);
    let graph = build_contact_graph(config);
    color_with_marks(config, &graph, &marks, p, q, SpecialParse::AllGrains)
}

/// Colors `config` with the given marks.
pub fn color_with_marks(
    config: &Configuration,
    graph: &ContactGraph,
    marks: &Marks,
    p: f64,
    q: f64,
    parse: SpecialParse,
) -> Result<ColoredConfiguration> {
    check_probability("p", p)?;
    check_probability("q", q)?;
    check_free_ball(config)?;
    check_radii(config)?;
    if marks.activation.len() != config.len() || marks.green.len() != config.len() {
        return Err(Error::InvalidParameter("one mark pair per grain is required".into()));
    }
    let active: Vec<bool> = marks.activation.iter().map(|&u| u < p).collect();
    let special: Vec<bool> = (0..config.len())
        .map(|k| special_conditions(config, graph, k, Some(&active), parse))
        .collect();
    let color = (0..config.len())
        .map(|k| {
            if !active[k] {
                Color::Red
            } else if special[k] && marks.green[k] >= q {
                Color::Green
            } else {
                Color::Uncolored
            }
        })
        .collect();
    Ok(ColoredConfiguration {
        base: config.clone(),
        color,
        activation_marks: marks.activation.clone(),
        green_marks: marks.green.clone(),
        special,
        parse,
    })
}

/// Whether an uncolored chain joins a center in `B_1(o)` to a center in
/// `B_n(o) \ B_{n-1}(o)`.
pub fn crossing(colored: &ColoredConfiguration, n: f64) -> Result<bool> {
    let radius = check_free_ball(&colored.base)?;
    if n > radius + 1e-12 {
        return Err(Error::InvalidParameter(format!("n = {n} exceeds the window radius {radius}")));
    }
    let graph = build_contact_graph(&colored.base);
    Ok(open_crossing(&colored.base, &graph, &colored.uncolored(), n))
}

/// Breadth-first search over the `open` grains.
pub fn open_crossing(config: &Configuration, graph: &ContactGraph, open: &[bool], n: f64) -> bool {
    let dim = config.dim();
    let dist: Vec<f64> = config.grains().iter().map(|g| norm(&g.center, dim)).collect();
    let mut seen = vec![false; config.len()];
    let mut queue: VecDeque<usize> =
        (0..config.len()).filter(|&i| open[i] && dist[i] <= 1.0).collect();
    for &i in &queue {
        seen[i] = true;
    }
    while let Some(i) = queue.pop_front() {
        if dist[i] > n - 1.0 && dist[i] <= n {
            return true;
        }
        for &j in graph.neighbors(i) {
            if open[j] && !seen[j] && dist[j] <= n {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    false
}

/// Crossing of the plain model where every active grain is open; never
/// looks at dispensability.
pub fn plain_crossing(config: &Configuration, graph: &ContactGraph, marks: &Marks, p: f64, n: f64) -> bool {
    let open: Vec<bool> = marks.activation.iter().map(|&u| u < p).collect();
    open_crossing(config, graph, &open, n)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaEstimate {
    pub estimate: f64,
    /// Half-width of the normal 95% interval.
    pub half_width: f64,
    pub crossings: usize,
    pub replicates: usize,
}

impl ThetaEstimate {
    pub fn from_counts(crossings: usize, replicates: usize) -> Self {
        let estimate = crossings as f64 / replicates as f64;
        let half_width = 1.96 * (estimate * (1.0 - estimate) / replicates as f64).sqrt();
        ThetaEstimate { estimate, half_width, crossings, replicates }
    }
}

/// Configuration and marks of replicate `i`.
pub fn theta_replicate(
    n: f64,
    dim: usize,
    intensity: f64,
    law: RadiusLaw,
    seed: u64,
    i: u64,
) -> Result<(Configuration, Marks)> {
    let window = Window::free_ball(dim, n)?;
    let config = sample_poisson(intensity, law, window, derive_seed(seed, "theta-config", i))?;
    let marks = Marks::draw(config.len(), derive_seed(seed, "theta-marks", i));
    Ok((config, marks))
}

/// Crossing indicators of one replicate over a `(p, q)` grid sharing marks;
/// `out[a][b]` belongs to `ps[a]`, `qs[b]`.
pub fn crossing_grid(
    config: &Configuration,
    marks: &Marks,
    ps: &[f64],
    qs: &[f64],
    n: f64,
    parse: SpecialParse,
) -> Result<Vec<Vec<bool>>> {
    let graph = build_contact_graph(config);
    ps.iter()
        .map(|&p| {
            qs.iter()
                .map(|&q| {
                    let colored = color_with_marks(config, &graph, marks, p, q, parse)?;
                    Ok(open_crossing(config, &graph, &colored.uncolored(), n))
                })
                .collect()
        })
        .collect()
}

/// Monte Carlo estimate of `θ_n(p, q)` in dimension 2.
pub fn estimate_theta(
    n: f64,
    intensity: f64,
    law: RadiusLaw,
    p: f64,
    q: f64,
    replicates: usize,
    seed: u64,
) -> Result<ThetaEstimate> {
    estimate_theta_in(2, n, intensity, law, p, q, replicates, seed, SpecialParse::AllGrains)
}

#[allow(clippy::too_many_arguments)]
pub fn estimate_theta_in(
    dim: usize,
    n: f64,
    intensity: f64,
    law: RadiusLaw,
    p: f64,
    q: f64,
    replicates: usize,
    seed: u64,
    parse: SpecialParse,
) -> Result<ThetaEstimate> {
    if replicates == 0 {
        return Err(Error::InvalidParameter("at least one replicate is required".into()));
    }
    if law.min_radius() < 1.0 {
        return Err(Error::RadiusLawMismatch(format!(
            "radius law support must lie in [1, m], lower end is {}",
            law.min_radius()
        )));
    }
    let mut crossings = 0;
    for i in 0..replicates as u64 {
        let (config, marks) = theta_replicate(n, dim, intensity, law, seed, i)?;
        if crossing_grid(&config, &marks, &[p], &[q], n, parse)?[0][0] {
            crossings += 1;
        }
    }
    Ok(ThetaEstimate::from_counts(crossings, replicates))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ball(balls: &[([f64; 2], f64)], n: f64) -> Configuration {
        let w = Window::free_ball(2, n).unwrap();
        let b: Vec<_> = balls.iter().map(|&(c, r)| ([c[0], c[1], 0.0], r)).collect();
        Configuration::from_balls(w, &b).unwrap()
    }

    fn chain() -> Configuration {
        let balls: Vec<([f64; 2], f64)> = (0..5).map(|i| ([1.8 * i as f64, 0.0], 1.0)).collect();
        ball(&balls, 8.0)
    }

    fn all_marks(n: usize, u: f64) -> Marks {
        Marks { activation: vec![u; n], green: vec![u; n] }
    }

    #[test]
    fn chain_crosses_when_active() {
        let c = chain();
        let g = build_contact_graph(&c);
        let col = color_with_marks(&c, &g, &all_marks(5, 0.1), 0.5, 0.5, SpecialParse::AllGrains).unwrap();
        assert!(col.color.iter().all(|&x| x == Color::Uncolored));
        assert!(crossing(&col, 8.0).unwrap());
    }

    #[test]
    fn all_red_never_crosses() {
        let c = chain();
        let g = build_contact_graph(&c);
        let col = color_with_marks(&c, &g, &all_marks(5, 0.9), 0.5, 0.5, SpecialParse::AllGrains).unwrap();
        assert!(col.color.iter().all(|&x| x == Color::Red));
        assert!(!crossing(&col, 8.0).unwrap());
    }

    #[test]
    fn no_grain_near_origin() {
        let c = ball(&[([3.0, 0.0], 1.0), ([4.8, 0.0], 1.0), ([6.6, 0.0], 1.0)], 7.0);
        let open = vec![true; 3];
        assert!(!open_crossing(&c, &build_contact_graph(&c), &open, 7.0));
    }

    #[test]
    fn broken_chain_does_not_cross() {
        let c = chain();
        let g = build_contact_graph(&c);
        let mut marks = all_marks(5, 0.1);
        marks.activation[2] = 0.9;
        let col = color_with_marks(&c, &g, &marks, 0.5, 0.5, SpecialParse::AllGrains).unwrap();
        assert!(!crossing(&col, 8.0).unwrap());
    }

    #[test]
    fn green_requires_special_and_active() {
        // A small grain touching one large grain whose only neighbour it is.
        let c = ball(&[([0.0, 0.0], 1.02), ([1.5, 0.0], 1.08)], 5.0);
        let g = build_contact_graph(&c);
        let marks = Marks { activation: vec![0.1, 0.1], green: vec![0.9, 0.9] };
        let col = color_with_marks(&c, &g, &marks, 0.5, 0.5, SpecialParse::AllGrains).unwrap();
        assert_eq!(col.color, vec![Color::Green, Color::Uncolored]);
        let col = color_with_marks(&c, &g, &marks, 0.5, 0.95, SpecialParse::AllGrains).unwrap();
        assert_eq!(col.color, vec![Color::Uncolored, Color::Uncolored]);
        // With its witness red the small grain is no longer special.
        let marks = Marks { activation: vec![0.1, 0.7], green: vec![0.9, 0.9] };
        let col = color_with_marks(&c, &g, &marks, 0.5, 0.5, SpecialParse::AllGrains).unwrap();
        assert_eq!(col.color, vec![Color::Uncolored, Color::Red]);
    }

    #[test]
    fn rejects_torus_and_small_radii() {
        let t = Configuration::from_balls(Window::torus(2, 10.0).unwrap(), &[([0.0; 3], 1.0)]).unwrap();
        assert!(color(&t, 0.5, 0.5, 0).is_err());
        let c = ball(&[([0.0, 0.0], 0.5)], 5.0);
        assert!(matches!(color(&c, 0.5, 0.5, 0), Err(Error::RadiusLawMismatch(_))));
    }

    #[test]
    fn q_one_matches_plain_model() {
        let law = RadiusLaw::Uniform { lo: 1.0, hi: 1.1 };
        for i in 0..20 {
            let (c, marks) = theta_replicate(6.0, 2, 0.4, law, 5, i).unwrap();
            let g = build_contact_graph(&c);
            for p in [0.3, 0.7, 1.0] {
                let grid = crossing_grid(&c, &marks, &[p], &[1.0], 6.0, SpecialParse::AllGrains).unwrap();
                assert_eq!(grid[0][0], plain_crossing(&c, &g, &marks, p, 6.0));
            }
        }
    }

    #[test]
    fn almost_all_red_gives_small_theta() {
        let law = RadiusLaw::Uniform { lo: 1.0, hi: 1.1 };
        let est = estimate_theta(6.0, 1.0, law, 0.01, 0.5, 100, 3).unwrap();
        assert!(est.estimate < 0.05);
        let again = estimate_theta(6.0, 1.0, law, 0.01, 0.5, 100, 3).unwrap();
        assert_eq!(est, again);
    }
}
