//! Simple undirected host graphs stored as packed symmetric bit matrices.

use crate::error::{Error, Result};
use crate::set::VertexSet;

/// Default cap on the number of vertices a [`Graph`] may hold.
pub const DEFAULT_VERTEX_LIMIT: usize = 4096;

/// An immutable simple graph on vertices `0..n`.
///
/// Rows of the adjacency matrix are kept as [`VertexSet`]s so neighbourhood
/// intersections are word-parallel. The edge count and degrees are cached at
/// construction.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    rows: Vec<VertexSet>,
    edge_count: u64,
    degrees: Vec<usize>,
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n())
            .field("edges", &self.edge_count)
            .finish()
    }
}

impl Graph {
    /// Builds a graph from unordered pairs. Duplicate pairs collapse.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::from_edges_with_limit(n, edges, DEFAULT_VERTEX_LIMIT)
    }

    pub fn from_edges_with_limit<I>(n: usize, edges: I, limit: usize) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n > limit {
            return Err(Error::input(format!(
                "{n} vertices exceeds the limit of {limit}"
            )));
        }
        let mut rows = vec![VertexSet::empty(n); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::input(format!(
                    "edge ({u}, {v}) has an endpoint outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::input(format!("self-loop at vertex {u}")));
            }
            rows[u].insert(v);
            rows[v].insert(u);
        }
        Ok(Self::from_rows(rows))
    }

    fn from_rows(rows: Vec<VertexSet>) -> Self {
        let degrees: Vec<usize> = rows.iter().map(VertexSet::len).collect();
        let edge_count = degrees.iter().map(|&d| d as u64).sum::<u64>() / 2;
        Graph {
            rows,
            edge_count,
            degrees,
        }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_rows(vec![VertexSet::empty(n); n])
    }

    pub fn complete(n: usize) -> Self {
        let rows = (0..n)
            .map(|u| {
                let mut row = VertexSet::full(n);
                row.remove(u);
                row
            })
            .collect();
        Self::from_rows(rows)
    }

    /// Cycle `0-1-..-(n-1)-0`; needs `n >= 3`.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::input("a cycle needs at least 3 vertices"));
        }
        Self::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    pub fn path(n: usize) -> Self {
        Self::from_edges(n, (1..n).map(|i| (i - 1, i))).expect("path edges are valid")
    }

    /// Star with centre 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        Self::from_edges(leaves + 1, (1..=leaves).map(|i| (0, i))).expect("star edges are valid")
    }

    /// Complete bipartite graph with sides `0..a` and `a..a+b`.
    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let edges = (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v)));
        Self::from_edges(a + b, edges).expect("bipartite edges are valid")
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn edge_count(&self) -> u64 {
        self.edge_count
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u].contains(v)
    }

    #[inline]
    pub fn neighborhood(&self, u: usize) -> &VertexSet {
        &self.rows[u]
    }

    pub fn degree(&self, u: usize) -> Result<usize> {
        self.degrees
            .get(u)
            .copied()
            .ok_or_else(|| Error::input(format!("vertex {u} outside 0..{}", self.n())))
    }

    /// Degrees indexed by vertex.
    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn degree_sequence(&self) -> Vec<usize> {
        self.degrees.clone()
    }

    /// `e(G) / C(n, 2)`.
    pub fn edge_density(&self) -> Result<f64> {
        let n = self.n();
        if n < 2 {
            return Err(Error::input("edge density needs at least 2 vertices"));
        }
        Ok(self.edge_count as f64 / (n as f64 * (n as f64 - 1.0) / 2.0))
    }

    pub fn full_set(&self) -> VertexSet {
        VertexSet::full(self.n())
    }

    pub(crate) fn check_set(&self, set: &VertexSet) -> Result<()> {
        if set.universe() != self.n() {
            return Err(Error::input(format!(
                "vertex set over {} vertices used with a graph on {}",
                set.universe(),
                self.n()
            )));
        }
        Ok(())
    }

    /// Number of unordered edges with both endpoints in `set`.
    pub fn edges_within(&self, set: &VertexSet) -> u64 {
        self.edges_between(set, set) / 2
    }

    /// Ordered pairs `(u, v)` with `u` in `a`, `v` in `b` and `uv` an edge.
    /// Edges inside `a ∩ b` are therefore counted twice.
    pub fn edges_between(&self, a: &VertexSet, b: &VertexSet) -> u64 {
        a.iter()
            .map(|u| self.rows[u].intersection_len(b) as u64)
            .sum()
    }

    /// Edges as `(u, v)` pairs with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(u, row)| row.iter().filter(move |&v| v > u).map(move |v| (u, v)))
    }

    /// Relabels vertex `u` as `perm[u]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::input("relabeling is not a permutation"));
        }
        Self::from_edges(n, self.edges().map(|(u, v)| (perm[u], perm[v])))
    }

    /// Copy of the graph with `extra` isolated vertices appended.
    pub fn with_isolated(&self, extra: usize) -> Result<Self> {
        Self::from_edges(self.n() + extra, self.edges())
    }

    /// Adjacency matrix as dense `f64` rows.
    pub fn adjacency_dense(&self) -> Vec<f64> {
        let n = self.n();
        let mut out = vec![0.0; n * n];
        for (u, v) in self.edges() {
            out[u * n + v] = 1.0;
            out[v * n + u] = 1.0;
        }
        out
    }
}
