//! Uniform grid sampling of `W` with nodes ordered by increasing value.

use crate::potential::{Domain, Potential};

use super::union_find::DisjointSet;
use super::TopologyError;

/// Uniform lattice over the domain; 2-neighbor adjacency in 1D,
/// 4-neighbor in 2D.
#[derive(Clone, Debug)]
pub struct Grid {
    pub dim: usize,
    /// Nodes per axis; `shape[1] == 1` in 1D.
    pub shape: [usize; 2],
    pub domain: Domain,
}

impl Grid {
    pub fn new(domain: Domain, nodes_per_axis: usize) -> Self {
        let dim = domain.dimension();
        let shape = if dim == 1 {
            [nodes_per_axis, 1]
        } else {
            [nodes_per_axis, nodes_per_axis]
        };
        Grid { dim, shape, domain }
    }

    pub fn node_count(&self) -> usize {
        self.shape[0] * self.shape[1]
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.domain.width(axis) / (self.shape[axis] - 1) as f64
    }

    pub fn max_spacing(&self) -> f64 {
        (0..self.dim).map(|a| self.spacing(a)).fold(0.0, f64::max)
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.shape[0] + ix
    }

    #[inline]
    pub fn split(&self, idx: usize) -> (usize, usize) {
        (idx % self.shape[0], idx / self.shape[0])
    }

    pub fn coords(&self, idx: usize) -> [f64; 2] {
        let (ix, iy) = self.split(idx);
        let x = self.domain.bounds[0][0] + self.spacing(0) * ix as f64;
        let y = if self.dim == 2 {
            self.domain.bounds[1][0] + self.spacing(1) * iy as f64
        } else {
            0.0
        };
        [x, y]
    }

    /// Linear index of the grid node closest to `p` (clamped into the box).
    pub fn nearest_node(&self, p: &[f64]) -> usize {
        let clamp_axis = |axis: usize, v: f64| -> usize {
            let t = (v - self.domain.bounds[axis][0]) / self.spacing(axis);
            (t.round().max(0.0) as usize).min(self.shape[axis] - 1)
        };
        let ix = clamp_axis(0, p[0]);
        let iy = if self.dim == 2 { clamp_axis(1, p[1]) } else { 0 };
        self.index(ix, iy)
    }

    /// Axis-aligned neighbors of `idx`, written into `out`; returns the count.
    pub fn neighbors(&self, idx: usize, out: &mut [usize; 4]) -> usize {
        let (ix, iy) = self.split(idx);
        let mut n = 0;
        if ix > 0 {
            out[n] = self.index(ix - 1, iy);
            n += 1;
        }
        if ix + 1 < self.shape[0] {
            out[n] = self.index(ix + 1, iy);
            n += 1;
        }
        if self.dim == 2 {
            if iy > 0 {
                out[n] = self.index(ix, iy - 1);
                n += 1;
            }
            if iy + 1 < self.shape[1] {
                out[n] = self.index(ix, iy + 1);
                n += 1;
            }
        }
        n
    }
}

/// `W` sampled at the grid nodes, with nodes sorted once by
/// `(value, node index)`; reusable for all level queries.
#[derive(Clone, Debug)]
pub struct Filtration {
    pub grid: Grid,
    pub values: Vec<f64>,
    /// Permutation of all node indices, increasing value, ties by index.
    pub order: Vec<usize>,
}

/// Soft cap on node count; beyond this the builder refuses rather than
/// silently allocating gigabytes.
pub const DEFAULT_MAX_NODES: usize = 1 << 25;

impl Filtration {
    pub fn build(
        potential: &Potential,
        nodes_per_axis: usize,
        max_nodes: Option<usize>,
    ) -> Result<Self, TopologyError> {
        assert!(nodes_per_axis >= 64, "nodes_per_axis must be >= 64");
        let grid = Grid::new(potential.domain().clone(), nodes_per_axis);
        let cap = max_nodes.unwrap_or(DEFAULT_MAX_NODES);
        if grid.node_count() > cap {
            return Err(TopologyError::MemoryBound {
                nodes: grid.node_count(),
                cap,
            });
        }
        let mut values = Vec::with_capacity(grid.node_count());
        for idx in 0..grid.node_count() {
            let p = grid.coords(idx);
            let v = potential
                .value(&p)
                .map_err(|e| TopologyError::Evaluation(e.to_string()))?;
            values.push(v);
        }
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| {
            values[a]
                .partial_cmp(&values[b])
                .unwrap()
                .then_with(|| a.cmp(&b))
        });
        Ok(Filtration { grid, values, order })
    }

    /// Connected components of `{W < threshold}` via a fresh union-find pass.
    ///
    /// Returns one entry per node: the component representative (the smallest
    /// node index in the component), or `usize::MAX` above the threshold.
    pub fn components_below(&self, threshold: f64) -> Vec<usize> {
        let n = self.values.len();
        let mut ds = DisjointSet::new(n);
        let mut active = vec![false; n];
        let mut nb = [0usize; 4];
        for &u in &self.order {
            if self.values[u] >= threshold {
                break;
            }
            active[u] = true;
            let cnt = self.grid.neighbors(u, &mut nb);
            for &v in &nb[..cnt] {
                if active[v] {
                    ds.union(u, v);
                }
            }
        }
        // canonical representative: minimal node index per component
        let mut rep = vec![usize::MAX; n];
        for u in 0..n {
            if active[u] {
                let r = ds.find(u);
                if rep[r] == usize::MAX || u < rep[r] {
                    rep[r] = rep[r].min(u);
                }
            }
        }
        let mut out = vec![usize::MAX; n];
        for u in 0..n {
            if active[u] {
                out[u] = rep[ds.find(u)];
            }
        }
        out
    }
}
