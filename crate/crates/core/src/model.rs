//! Grains, windows and Poisson Boolean model sampling.

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Points are stored in three slots; coordinates past the window dimension stay zero.
pub type Point = [f64; 3];

pub const MAX_DIM: usize = 3;

/// A closed ball `B_r(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grain {
    pub id: usize,
    pub center: Point,
    pub radius: f64,
}

impl Grain {
    pub fn new(id: usize, center: Point, radius: f64) -> Self {
        Grain { id, center, radius }
    }
}

/// Volume of the unit ball in dimension `dim`.
pub fn unit_ball_volume(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI / 3.0,
        _ => panic!("unsupported dimension {dim}"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowKind {
    /// Periodic cube `[-L/2, L/2)^d`.
    Torus { side: f64 },
    /// Euclidean ball `B_n(o)` with free boundary.
    FreeBall { radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub kind: WindowKind,
    pub dim: usize,
}

impl Window {
    pub fn torus(dim: usize, side: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(side.is_finite() && side > 0.0) {
            return Err(Error::InvalidWindow(format!("torus side must be positive, got {side}")));
        }
        Ok(Window { kind: WindowKind::Torus { side }, dim })
    }

    pub fn free_ball(dim: usize, radius: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(radius.is_finite() && radius >= 3.0) {
            return Err(Error::InvalidWindow(format!(
                "free ball radius must be at least 3, got {radius}"
            )));
        }
        Ok(Window { kind: WindowKind::FreeBall { radius }, dim })
    }

    pub fn is_torus(&self) -> bool {
        matches!(self.kind, WindowKind::Torus { .. })
    }

    pub fn torus_side(&self) -> Option<f64> {
        match self.kind {
            WindowKind::Torus { side } => Some(side),
            WindowKind::FreeBall { .. } => None,
        }
    }

    /// Lebesgue measure of the window.
    pub fn volume(&self) -> f64 {
        match self.kind {
            WindowKind::Torus { side } => side.powi(self.dim as i32),
            WindowKind::FreeBall { radius } => {
                unit_ball_volume(self.dim) * radius.powi(self.dim as i32)
            }
        }
    }

    /// Largest grain radius the window tolerates.
    pub fn max_admissible_radius(&self) -> f64 {
        match self.kind {
            WindowKind::Torus { side } => side / 4.0,
            WindowKind::FreeBall { .. } => f64::INFINITY,
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        match self.kind {
            WindowKind::Torus { side } => {
                let h = side / 2.0;
                p[..self.dim].iter().all(|&x| (-h..h).contains(&x))
            }
            WindowKind::FreeBall { radius } => norm(p, self.dim) <= radius,
        }
    }

    /// Displacement `b - a`, taking the minimal image on the torus.
    pub fn displacement(&self, a: &Point, b: &Point) -> Point {
        let mut d = [0.0; 3];
        for k in 0..self.dim {
            d[k] = b[k] - a[k];
        }
        if let WindowKind::Torus { side } = self.kind {
            for v in d.iter_mut().take(self.dim) {
                *v -= side * (*v / side).round();
            }
        }
        d
    }

    pub fn distance(&self, a: &Point, b: &Point) -> f64 {
        norm(&self.displacement(a, b), self.dim)
    }

    /// Maps a point back into the fundamental domain of the torus.
    pub fn wrap(&self, p: &Point) -> Point {
        let mut q = *p;
        if let WindowKind::Torus { side } = self.kind {
            for v in q.iter_mut().take(self.dim) {
                *v -= side * (*v / side).round();
                if *v >= side / 2.0 {
                    *v -= side;
                }
            }
        }
        q
    }

    /// Uniform point in the window.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let mut p = [0.0; 3];
        match self.kind {
            WindowKind::Torus { side } => {
                for v in p.iter_mut().take(self.dim) {
                    *v = rng.random_range(-side / 2.0..side / 2.0);
                }
                p
            }
            WindowKind::FreeBall { radius } => loop {
                for v in p.iter_mut().take(self.dim) {
                    *v = rng.random_range(-radius..radius);
                }
                if norm(&p, self.dim) <= radius {
                    return p;
                }
            },
        }
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if (1..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(Error::InvalidWindow(format!("dimension must be 1, 2 or 3, got {dim}")))
    }
}

pub fn norm(p: &Point, dim: usize) -> f64 {
    p[..dim].iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Radius distribution of the grains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadiusLaw {
    Fixed(f64),
    Uniform { lo: f64, hi: f64 },
}

impl RadiusLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            RadiusLaw::Fixed(r) if r.is_finite() && r > 0.0 => Ok(()),
            RadiusLaw::Uniform { lo, hi } if lo >= 0.0 && hi > lo && hi.is_finite() => Ok(()),
            other => Err(Error::InvalidParameter(format!("invalid radius law {other:?}"))),
        }
    }

    pub fn max_radius(&self) -> f64 {
        match *self {
            RadiusLaw::Fixed(r) => r,
            RadiusLaw::Uniform { hi, .. } => hi,
        }
    }

    pub fn min_radius(&self) -> f64 {
        match *self {
            RadiusLaw::Fixed(r) => r,
            RadiusLaw::Uniform { lo, .. } => lo,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            RadiusLaw::Fixed(r) => r,
            RadiusLaw::Uniform { lo, hi } => loop {
                let r = rng.random_range(lo..hi);
                if r > 0.0 {
                    return r;
                }
            },
        }
    }
}

/// A finite realization of the particle process inside a window.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    window: Window,
    grains: Vec<Grain>,
    max_radius: f64,
}

impl Configuration {
    /// Builds a configuration; grain ids are reassigned to `0..n` in list order.
    pub fn new(window: Window, grains: Vec<Grain>) -> Result<Self> {
        let mut grains = grains;
        let mut max_radius: f64 = 0.0;
        for (i, g) in grains.iter_mut().enumerate() {
            if !(g.radius.is_finite() && g.radius > 0.0) {
                return Err(Error::InvalidConfiguration(format!(
                    "grain {i} has non-positive radius {}",
                    g.radius
                )));
            }
            if g.center[window.dim..].iter().any(|&x| x != 0.0) {
                return Err(Error::InvalidConfiguration(format!(
                    "grain {i} has coordinates beyond dimension {}",
                    window.dim
                )));
            }
            if !window.contains(&g.center) {
                return Err(Error::InvalidConfiguration(format!(
                    "grain {i} center {:?} lies outside the window",
                    &g.center[..window.dim]
                )));
            }
            g.id = i;
            max_radius = max_radius.max(g.radius);
        }
        if max_radius >= window.max_admissible_radius() {
            return Err(Error::InvalidWindow(format!(
                "torus side must exceed 4 x max radius {max_radius}"
            )));
        }
        Ok(Configuration { window, grains, max_radius })
    }

    /// Convenience constructor from `(center, radius)` pairs.
    pub fn from_balls(window: Window, balls: &[(Point, f64)]) -> Result<Self> {
        let grains = balls
            .iter()
            .enumerate()
            .map(|(i, &(c, r))| Grain::new(i, c, r))
            .collect();
        Configuration::new(window, grains)
    }

    pub fn empty(window: Window) -> Self {
        Configuration { window, grains: Vec::new(), max_radius: 0.0 }
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn dim(&self) -> usize {
        self.window.dim
    }

    pub fn grains(&self) -> &[Grain] {
        &self.grains
    }

    pub fn grain(&self, id: usize) -> Result<&Grain> {
        self.grains.get(id).ok_or(Error::UnknownGrain(id))
    }

    pub fn len(&self) -> usize {
        self.grains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grains.is_empty()
    }

    pub fn max_radius(&self) -> f64 {
        self.max_radius
    }

    /// Sub-configuration keeping the given ids, renumbered in ascending order.
    pub fn restrict(&self, ids: &[usize]) -> Configuration {
        let mut ids = ids.to_vec();
        ids.sort_unstable();
        ids.dedup();
        let grains: Vec<Grain> = ids
            .iter()
            .enumerate()
            .map(|(new, &old)| Grain { id: new, ..self.grains[old] })
            .collect();
        let max_radius = grains.iter().map(|g| g.radius).fold(0.0, f64::max);
        Configuration { window: self.window, grains, max_radius }
    }

    pub fn overlap(&self, i: usize, j: usize) -> bool {
        interiors_overlap(&self.grains[i], &self.grains[j], &self.window)
    }
}

/// True iff the open balls intersect; tangent balls do not overlap.
pub fn interiors_overlap(a: &Grain, b: &Grain, window: &Window) -> bool {
    window.distance(&a.center, &b.center) < a.radius + b.radius
}

/// Samples a Poisson Boolean model of balls.
pub fn sample_poisson(
    intensity: f64,
    law: RadiusLaw,
    window: Window,
    seed: u64,
) -> Result<Configuration> {
    if !(intensity.is_finite() && intensity > 0.0) {
        return Err(Error::InvalidParameter(format!("intensity must be positive, got {intensity}")));
    }
    law.validate()?;
    if law.max_radius() >= window.max_admissible_radius() {
        return Err(Error::InvalidWindow(format!(
            "torus side must exceed 4 x max radius {} of the radius law",
            law.max_radius()
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mean = intensity * window.volume();
    let count = Poisson::new(mean)
        .map_err(|e| Error::InvalidParameter(format!("poisson mean {mean}: {e}")))?
        .sample(&mut rng) as usize;
    let grains = (0..count)
        .map(|id| {
            let center = window.sample_point(&mut rng);
            let radius = law.sample(&mut rng);
            Grain { id, center, radius }
        })
        .collect();
    Configuration::new(window, grains)
}
