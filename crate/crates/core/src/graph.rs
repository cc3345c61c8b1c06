//! Contact graph, connected components and the directed intersection graph.

use crate::error::{Error, Result};
use crate::model::Configuration;
use crate::spatial::SpatialGrid;

/// Undirected overlap graph: `i ~ j` iff the grain interiors intersect.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContactGraph {
    adjacency: Vec<Vec<usize>>,
}

impl ContactGraph {
    pub fn from_adjacency(adjacency: Vec<Vec<usize>>) -> Self {
        ContactGraph { adjacency }
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    /// Sorted neighbour ids.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].binary_search(&j).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Components of the subgraph induced by `members` (any order, duplicates ignored).
    pub fn induced_components(&self, members: &[usize]) -> Vec<Vec<usize>> {
        let mut inside = vec![false; self.len()];
        for &m in members {
            inside[m] = true;
        }
        let mut uf = UnionFind::new(self.len());
        for &i in members {
            for &j in &self.adjacency[i] {
                if inside[j] {
                    uf.union(i, j);
                }
            }
        }
        group_by_root(&mut uf, (0..self.len()).filter(|&i| inside[i]))
    }
}

/// Builds the contact graph using a grid with cell size `2 · max radius`.
pub fn build_contact_graph(config: &Configuration) -> ContactGraph {
    let n = config.len();
    let mut adjacency = vec![Vec::new(); n];
    if n == 0 {
        return ContactGraph { adjacency };
    }
    let grid = SpatialGrid::for_grains(config);
    let rmax = config.max_radius();
    for g in config.grains() {
        grid.visit(&g.center, g.radius + rmax, |j| {
            if j > g.id && config.overlap(g.id, j) {
                adjacency[g.id].push(j);
                adjacency[j].push(g.id);
            }
        });
    }
    for adj in &mut adjacency {
        adj.sort_unstable();
        adj.dedup();
    }
    ContactGraph { adjacency }
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

fn group_by_root(uf: &mut UnionFind, members: impl Iterator<Item = usize>) -> Vec<Vec<usize>> {
    let mut slot = vec![usize::MAX; uf.parent.len()];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    // Members arrive in ascending order, so groups come out sorted by smallest id.
    for i in members {
        let r = uf.find(i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

/// Connected components, each sorted, listed by smallest member id.
pub fn connected_components(graph: &ContactGraph) -> Vec<Vec<usize>> {
    let n = graph.len();
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        for &j in graph.neighbors(i) {
            if j > i {
                uf.union(i, j);
            }
        }
    }
    group_by_root(&mut uf, 0..n)
}

/// Directed intersection graph: `i -> j` iff the grains overlap and `r_i < r_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    out_edges: Vec<Vec<usize>>,
}

impl DirectedGraph {
    pub fn len(&self) -> usize {
        self.out_edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.out_edges.is_empty()
    }

    pub fn successors(&self, i: usize) -> &[usize] {
        &self.out_edges[i]
    }

    pub fn edge_count(&self) -> usize {
        self.out_edges.iter().map(Vec::len).sum()
    }

    /// Kahn's algorithm; `None` when a directed cycle exists.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.len();
        let mut indegree = vec![0usize; n];
        for outs in &self.out_edges {
            for &j in outs {
                indegree[j] += 1;
            }
        }
        let mut stack: Vec<usize> = (0..n).rev().filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(i) = stack.pop() {
            order.push(i);
            for &j in &self.out_edges[i] {
                indegree[j] -= 1;
                if indegree[j] == 0 {
                    stack.push(j);
                }
            }
        }
        (order.len() == n).then_some(order)
    }
}

pub fn build_directed_graph(config: &Configuration) -> DirectedGraph {
    directed_from_contact(config, &build_contact_graph(config))
}

/// Orients the contact edges from the smaller to the strictly larger grain.
pub fn directed_from_contact(config: &Configuration, contact: &ContactGraph) -> DirectedGraph {
    let grains = config.grains();
    let out_edges = (0..contact.len())
        .map(|i| {
            contact
                .neighbors(i)
                .iter()
                .copied()
                .filter(|&j| grains[i].radius < grains[j].radius)
                .collect()
        })
        .collect();
    DirectedGraph { out_edges }
}

/// `C(k)`: every id reachable from `k` by directed edges, including `k`. Sorted.
pub fn cluster(k: usize, graph: &DirectedGraph) -> Result<Vec<usize>> {
    if k >= graph.len() {
        return Err(Error::UnknownGrain(k));
    }
    let mut seen = vec![false; graph.len()];
    let mut stack = vec![k];
    seen[k] = true;
    let mut out = Vec::new();
    while let Some(i) = stack.pop() {
        out.push(i);
        for &j in graph.successors(i) {
            if !seen[j] {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}
