//! Uniform grid index for fixed-radius neighbour queries.

use crate::model::{Configuration, Point, Window, WindowKind};

const MAX_CELLS_PER_AXIS: usize = 1024;

/// Buckets of point indices on a regular grid covering the window.
///
/// Queries return a superset of the points within the requested reach; the
/// caller filters by exact distance.
#[derive(Debug, Clone)]
pub struct SpatialGrid {
    dim: usize,
    periodic: bool,
    lower: f64,
    width: f64,
    count: usize,
    buckets: Vec<Vec<usize>>,
}

impl SpatialGrid {
    pub fn new<I>(window: &Window, points: I, cell_size: f64) -> Self
    where
        I: IntoIterator<Item = (usize, Point)>,
    {
        let (lower, extent, periodic) = match window.kind {
            WindowKind::Torus { side } => (-side / 2.0, side, true),
            WindowKind::FreeBall { radius } => (-radius, 2.0 * radius, false),
        };
        let cell_size = if cell_size.is_finite() && cell_size > 0.0 { cell_size } else { extent };
        let count = ((extent / cell_size).floor() as usize).clamp(1, MAX_CELLS_PER_AXIS);
        let width = extent / count as f64;
        let dim = window.dim;
        let total = count.pow(dim as u32);
        let mut grid = SpatialGrid {
            dim,
            periodic,
            lower,
            width,
            count,
            buckets: vec![Vec::new(); total],
        };
        for (id, p) in points {
            let idx = grid.flat_index(&grid.cell_of(&p));
            grid.buckets[idx].push(id);
        }
        grid
    }

    /// Grid over grain centers with cell size `2 · max radius`.
    pub fn for_grains(config: &Configuration) -> Self {
        SpatialGrid::new(
            config.window(),
            config.grains().iter().map(|g| (g.id, g.center)),
            2.0 * config.max_radius(),
        )
    }

    fn axis_cell(&self, x: f64) -> isize {
        ((x - self.lower) / self.width).floor() as isize
    }

    fn cell_of(&self, p: &Point) -> [usize; 3] {
        let mut c = [0usize; 3];
        for k in 0..self.dim {
            c[k] = self.axis_cell(p[k]).clamp(0, self.count as isize - 1) as usize;
        }
        c
    }

    fn flat_index(&self, c: &[usize; 3]) -> usize {
        (0..self.dim).rev().fold(0, |acc, k| acc * self.count + c[k])
    }

    fn axis_range(&self, x: f64, reach: f64) -> Vec<usize> {
        let lo = self.axis_cell(x - reach);
        let hi = self.axis_cell(x + reach);
        let n = self.count as isize;
        if self.periodic {
            if hi - lo + 1 >= n {
                (0..self.count).collect()
            } else {
                (lo..=hi).map(|i| i.rem_euclid(n) as usize).collect()
            }
        } else {
            let lo = lo.max(0);
            let hi = hi.min(n - 1);
            if lo > hi {
                Vec::new()
            } else {
                (lo as usize..=hi as usize).collect()
            }
        }
    }

    /// Calls `f` for every indexed point whose cell may lie within `reach` of `p`.
    pub fn visit<F: FnMut(usize)>(&self, p: &Point, reach: f64, mut f: F) {
        let ranges: Vec<Vec<usize>> = (0..self.dim).map(|k| self.axis_range(p[k], reach)).collect();
        let mut cell = [0usize; 3];
        self.visit_rec(&ranges, 0, &mut cell, &mut f);
    }

    fn visit_rec<F: FnMut(usize)>(
        &self,
        ranges: &[Vec<usize>],
        axis: usize,
        cell: &mut [usize; 3],
        f: &mut F,
    ) {
        if axis == self.dim {
            for &id in &self.buckets[self.flat_index(cell)] {
                f(id);
            }
            return;
        }
        for &i in &ranges[axis] {
            cell[axis] = i;
            self.visit_rec(ranges, axis + 1, cell, f);
        }
    }

    /// Candidate ids near `p`, unsorted.
    pub fn near(&self, p: &Point, reach: f64) -> Vec<usize> {
        let mut out = Vec::new();
        self.visit(p, reach, |id| out.push(id));
        out
    }
}
