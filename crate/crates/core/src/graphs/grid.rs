//! Grids: graphs whose edges and vertices carry individually assigned weight
//! matrices, drawn from a shared pool.
//!
//! Invariants enforced at construction: every pool matrix is square over the
//! same domain; vertex-weight matrices are diagonal; matrices on undirected
//! edges are symmetric; all vertex and matrix indices are in range. A grid is
//! immutable after construction, so evaluators may trust these properties.
//!
//! Parallel edges appear as separate entries in the edge list; an edge with
//! `u == v` is a loop, whose evaluation reads the diagonal entry of its
//! matrix. Directed edges are representable (`directed` flag) but nothing in
//! this crate constructs one.

use crate::error::{Error, Result};
use crate::graphs::Multigraph;
use crate::numeric::RationalMatrix;

/// One weighted edge of a grid; `matrix` indexes the grid's pool.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridEdge {
    pub u: usize,
    pub v: usize,
    pub matrix: usize,
    pub directed: bool,
}

impl GridEdge {
    /// Undirected edge (or loop, when `u == v`) carrying pool matrix `matrix`.
    pub fn undirected(u: usize, v: usize, matrix: usize) -> Self {
        GridEdge { u, v, matrix, directed: false }
    }
}

/// A weighted grid: per-edge matrices and per-vertex diagonal weight matrices.
#[derive(Debug, Clone)]
pub struct GHGrid {
    domain: usize,
    vertex_count: usize,
    pool: Vec<RationalMatrix>,
    vertex_weights: Vec<usize>,
    edges: Vec<GridEdge>,
}

impl GHGrid {
    /// Validating constructor; the only way to build a grid.
    pub fn new(
        domain: usize,
        vertex_count: usize,
        pool: Vec<RationalMatrix>,
        vertex_weights: Vec<usize>,
        edges: Vec<GridEdge>,
    ) -> Result<Self> {
        if domain == 0 {
            return Err(Error::Contract("grid domain must be nonempty".into()));
        }
        for (id, m) in pool.iter().enumerate() {
            if m.rows() != domain || m.cols() != domain {
                return Err(Error::Shape(format!(
                    "pool matrix {id} is {}x{}, expected {domain}x{domain}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        if vertex_weights.len() != vertex_count {
            return Err(Error::Shape(format!(
                "{} vertex-weight assignments for {vertex_count} vertices",
                vertex_weights.len()
            )));
        }
        for (v, &id) in vertex_weights.iter().enumerate() {
            let m = pool.get(id).ok_or_else(|| {
                Error::Contract(format!("vertex {v} references missing pool matrix {id}"))
            })?;
            if !m.is_diagonal() {
                return Err(Error::Contract(format!(
                    "vertex-weight matrix {id} at vertex {v} is not diagonal"
                )));
            }
        }
        for (k, e) in edges.iter().enumerate() {
            if e.u >= vertex_count || e.v >= vertex_count {
                return Err(Error::Contract(format!(
                    "edge {k} touches vertex out of range ({}, {})",
                    e.u, e.v
                )));
            }
            let m = pool.get(e.matrix).ok_or_else(|| {
                Error::Contract(format!("edge {k} references missing pool matrix {}", e.matrix))
            })?;
            if !e.directed && !m.is_symmetric() {
                return Err(Error::Contract(format!(
                    "undirected edge {k} carries non-symmetric pool matrix {}",
                    e.matrix
                )));
            }
        }
        Ok(GHGrid { domain, vertex_count, pool, vertex_weights, edges })
    }

    /// Grid with matrix `a` on every edge of `g` and weight `d` on every vertex.
    pub fn uniform(a: &RationalMatrix, d: &RationalMatrix, g: &Multigraph) -> Result<Self> {
        if a.rows() != d.rows() {
            return Err(Error::Shape(format!(
                "edge matrix is {}x{} but vertex weights are {}x{}",
                a.rows(),
                a.cols(),
                d.rows(),
                d.cols()
            )));
        }
        let mut edges = Vec::new();
        for ((u, v), mult) in g.edge_pairs() {
            for _ in 0..mult {
                edges.push(GridEdge::undirected(u, v, 0));
            }
        }
        for (v, count) in g.loop_counts() {
            for _ in 0..count {
                edges.push(GridEdge::undirected(v, v, 0));
            }
        }
        GHGrid::new(
            a.rows(),
            g.vertex_count(),
            vec![a.clone(), d.clone()],
            vec![1; g.vertex_count()],
            edges,
        )
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[GridEdge] {
        &self.edges
    }

    pub fn pool_matrix(&self, id: usize) -> &RationalMatrix {
        &self.pool[id]
    }

    /// Diagonal weight matrix attached to vertex `v`.
    pub fn vertex_weight(&self, v: usize) -> &RationalMatrix {
        &self.pool[self.vertex_weights[v]]
    }
}
