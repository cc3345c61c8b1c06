//! Voronoi tessellations with nearest-seed assignment in the window metric.

use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::model::{norm, Point, Window, WindowKind};
use crate::rng::rng_on_stream;
use crate::spatial::SpatialGrid;

const MAX_RESAMPLES: u64 = 10_000;

/// Voronoi tessellation of the window; cell `i` collects the points whose
/// nearest seed is seed `i`, ties going to the lowest index.
#[derive(Debug, Clone)]
pub struct Tessellation {
    window: Window,
    seeds: Vec<Point>,
    index: SpatialGrid,
    spacing: f64,
}

impl Tessellation {
    pub fn new(window: Window, seeds: Vec<Point>) -> Result<Self> {
        if seeds.is_empty() {
            return Err(Error::InvalidParameter("a tessellation needs at least one seed".into()));
        }
        if let Some(p) = seeds.iter().find(|p| !window.contains(p)) {
            return Err(Error::InvalidParameter(format!("seed {p:?} lies outside the window")));
        }
        let spacing = (window.volume() / seeds.len() as f64).powf(1.0 / window.dim as f64);
        let index = SpatialGrid::new(&window, seeds.iter().copied().enumerate(), spacing);
        Ok(Tessellation { window, seeds, index, spacing })
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn seeds(&self) -> &[Point] {
        &self.seeds
    }

    pub fn len(&self) -> usize {
        self.seeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seeds.is_empty()
    }

    fn max_distance(&self) -> f64 {
        match self.window.kind {
            WindowKind::Torus { side } => side * (self.window.dim as f64).sqrt() / 2.0,
            WindowKind::FreeBall { radius } => 2.0 * radius,
        }
    }

    /// Nearest seed and its distance.
    pub fn nearest(&self, p: &Point) -> (usize, f64) {
        let mut reach = self.spacing;
        loop {
            let exhaustive = reach >= self.max_distance();
            let candidates: Vec<usize> = if exhaustive {
                (0..self.seeds.len()).collect()
            } else {
                self.index.near(p, reach)
            };
            let mut best: Option<(usize, f64)> = None;
            for j in candidates {
                let d = self.window.distance(p, &self.seeds[j]);
                best = match best {
                    Some((bj, bd)) if bd < d || (bd == d && bj < j) => Some((bj, bd)),
                    _ => Some((j, d)),
                };
            }
            if let Some((j, d)) = best {
                if exhaustive || d <= reach {
                    return (j, d);
                }
            }
            reach *= 2.0;
        }
    }

    pub fn cell_of(&self, p: &Point) -> usize {
        self.nearest(p).0
    }

    /// Displacements from `p` to the periodic images of seed `j` that lie
    /// closer than `limit`. The minimal image comes first.
    fn images(&self, p: &Point, j: usize, limit: f64) -> Vec<Point> {
        let base = self.window.displacement(p, &self.seeds[j]);
        let dim = self.window.dim;
        let side = match self.window.kind {
            WindowKind::Torus { side } => side,
            WindowKind::FreeBall { .. } => {
                return if norm(&base, dim) < limit { vec![base] } else { Vec::new() };
            }
        };
        let mut out = Vec::new();
        for code in 0..3usize.pow(dim as u32) {
            let mut v = base;
            let mut c = code;
            for x in v.iter_mut().take(dim) {
                *x += side * ((c % 3) as f64 - 1.0);
                c /= 3;
            }
            if norm(&v, dim) < limit {
                out.push(v);
            }
        }
        out
    }

    /// Whether `B_radius(center)` lies inside cell `cell`.
    ///
    /// The ball must sit on the cell side of the bisector between the cell
    /// seed and every competing seed image, at distance at least `radius`.
    pub fn contains_ball(&self, cell: usize, center: &Point, radius: f64) -> bool {
        let (own, d0) = self.nearest(center);
        if own != cell {
            return false;
        }
        let dim = self.window.dim;
        let limit = d0 + 2.0 * radius;
        // Own images that could matter are at most `limit + side` away.
        let own_images = self.images(center, cell, f64::INFINITY);
        let candidates = self.competitors(center, limit);
        for j in candidates {
            if j == cell {
                continue;
            }
            for other in self.images(center, j, limit) {
                let shielded = own_images.iter().any(|a| {
                    let mut diff = [0.0; 3];
                    for k in 0..dim {
                        diff[k] = other[k] - a[k];
                    }
                    let gap = norm(&diff, dim);
                    let na = norm(a, dim);
                    let nb = norm(&other, dim);
                    gap > 0.0 && (nb * nb - na * na) / (2.0 * gap) >= radius
                });
                if !shielded {
                    return false;
                }
            }
        }
        true
    }

    fn competitors(&self, p: &Point, reach: f64) -> Vec<usize> {
        if reach >= self.max_distance() {
            (0..self.seeds.len()).collect()
        } else {
            self.index.near(p, reach)
        }
    }

    /// Whether the cube `p + [-half, half]^d` meets a cell other than the one
    /// containing `p`, and how many distinct other cells it meets.
    pub fn cube_meets_boundary(&self, p: &Point, half: f64) -> (bool, usize) {
        let (own, d0) = self.nearest(p);
        let dim = self.window.dim;
        let limit = d0 + 2.0 * half * (dim as f64).sqrt() + 1e-12;
        // Own images farther than `limit` are beaten by the nearest one everywhere in the cube.
        let own_images = self.images(p, own, limit);
        let mut hits = 0;
        for j in self.competitors(p, limit) {
            if j == own {
                continue;
            }
            let meets = self
                .images(p, j, limit)
                .iter()
                .any(|b| closer_somewhere(b, &own_images, half, dim));
            if meets {
                hits += 1;
            }
        }
        (hits > 0, hits)
    }
}

/// Whether some `u` in `[-half, half]^d` is strictly closer to `b` than to every
/// point of `own`. Each comparison is the halfspace `2 u·(a - b) < |a|² - |b|²`.
fn closer_somewhere(b: &Point, own: &[Point], half: f64, dim: usize) -> bool {
    let planes: Vec<([f64; 3], f64)> = own
        .iter()
        .map(|a| {
            let mut n = [0.0; 3];
            for k in 0..dim {
                n[k] = 2.0 * (a[k] - b[k]);
            }
            let rhs = (0..dim).map(|k| a[k] * a[k] - b[k] * b[k]).sum::<f64>();
            (n, rhs)
        })
        .collect();
    if let [(n, rhs)] = planes[..] {
        let low: f64 = -half * (0..dim).map(|k| n[k].abs()).sum::<f64>();
        return low < rhs;
    }
    max_slack(&planes, half, dim) > 1e-12 * half.max(1.0)
}

/// Largest `t` such that some `u` in the cube has `n̂_i·u + t <= r_i / |n_i|`
/// for every plane, found by enumerating vertices of the `(u, t)` polytope.
fn max_slack(planes: &[([f64; 3], f64)], half: f64, dim: usize) -> f64 {
    let vars = dim + 1;
    let mut rows: Vec<[f64; 5]> = Vec::new();
    for (n, r) in planes {
        let len = n[..dim].iter().map(|x| x * x).sum::<f64>().sqrt();
        if len == 0.0 {
            continue;
        }
        let mut row = [0.0; 5];
        for k in 0..dim {
            row[k] = n[k] / len;
        }
        row[dim] = 1.0;
        row[vars] = r / len;
        rows.push(row);
    }
    for k in 0..dim {
        for sign in [1.0, -1.0] {
            let mut row = [0.0; 5];
            row[k] = sign;
            row[vars] = half;
            rows.push(row);
        }
    }
    // Caps the slack so the polytope has a top vertex.
    let mut cap = [0.0; 5];
    cap[dim] = 1.0;
    cap[vars] = half * (dim as f64).sqrt() + 1.0;
    rows.push(cap);

    let eps = 1e-9 * (1.0 + half);
    let mut best = f64::NEG_INFINITY;
    let m = rows.len();
    let mut pick: Vec<usize> = (0..vars).collect();
    loop {
        let chosen: Vec<[f64; 5]> = pick.iter().map(|&i| rows[i]).collect();
        if let Some(x) = solve(&chosen, vars) {
            let ok = rows.iter().all(|row| {
                let v: f64 = (0..vars).map(|k| row[k] * x[k]).sum();
                v <= row[vars] + eps
            });
            if ok {
                best = best.max(x[dim]);
            }
        }
        if !next_subset(&mut pick, m) {
            return best;
        }
    }
}

fn next_subset(pick: &mut [usize], m: usize) -> bool {
    let d = pick.len();
    for i in (0..d).rev() {
        if pick[i] < m - d + i {
            pick[i] += 1;
            for j in i + 1..d {
                pick[j] = pick[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Solves the square system given by the first `n` columns of each row and
/// the right-hand side in column `n`.
fn solve(rows: &[[f64; 5]], n: usize) -> Option<[f64; 4]> {
    let mut a: Vec<[f64; 5]> = rows.to_vec();
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        for row in 0..n {
            if row != col {
                let pivot = a[col];
                let f = a[row][col] / pivot[col];
                for (v, p) in a[row].iter_mut().zip(pivot).take(n + 1).skip(col) {
                    *v -= f * p;
                }
            }
        }
    }
    let mut x = [0.0; 4];
    for k in 0..n {
        x[k] = a[k][n] / a[k][k];
    }
    Some(x)
}

/// Poisson-Voronoi tessellation with seeds of the given intensity.
///
/// A realization without seeds is discarded and redrawn from the next
/// substream of `seed`.
pub fn sample_voronoi(window: Window, seed_intensity: f64, seed: u64) -> Result<Tessellation> {
    if !(seed_intensity.is_finite() && seed_intensity > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "seed intensity must be positive, got {seed_intensity}"
        )));
    }
    let mean = seed_intensity * window.volume();
    let poisson = Poisson::new(mean)
        .map_err(|e| Error::InvalidParameter(format!("poisson mean {mean}: {e}")))?;
    for stream in 0..MAX_RESAMPLES {
        let mut rng = rng_on_stream(seed, stream);
        let count = poisson.sample(&mut rng) as usize;
        if count == 0 {
            continue;
        }
        let seeds = (0..count).map(|_| window.sample_point(&mut rng)).collect();
        return Tessellation::new(window, seeds);
    }
    Err(Error::InvalidParameter(format!(
        "no seed drawn in {MAX_RESAMPLES} attempts at mean count {mean}"
    )))
}
