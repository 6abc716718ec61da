//! Finite simple graphs, random ensembles, induced edge counts, and
//! small-set sparsity certification.
//!
//! Graphs are immutable after construction; all queries are read-only and
//! safe to share across threads.

mod generate;
mod io;
mod sparsity;

pub use generate::{
    condition_simple, gen_configuration_multigraph, gen_erdos_renyi, gen_random_regular,
    gen_random_regular_with_attempts, REGULAR_MAX_ATTEMPTS,
};
pub use io::{read_degree_file, read_graph_file, write_graph_file};
pub use sparsity::{sparsity_check, SearchMode, SparsityVerdict};

use crate::error::{Error, Result};

/// A finite simple graph with vertex ids `0..n-1`.
///
/// Edges are stored as a lexicographically sorted list of pairs `(x, y)`
/// with `x < y`; per-vertex sorted neighbor lists are derived at
/// construction time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(u32, u32)>,
    adj: Vec<Vec<u32>>,
}

impl Graph {
    /// Builds a simple graph, rejecting self-loops, duplicate edges, and
    /// out-of-range vertex ids. Edge order and endpoint order are
    /// normalized.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        let mut norm: Vec<(u32, u32)> = Vec::new();
        for (a, b) in edges {
            if a as usize >= n {
                return Err(Error::VertexOutOfRange { vertex: a as usize, n });
            }
            if b as usize >= n {
                return Err(Error::VertexOutOfRange { vertex: b as usize, n });
            }
            if a == b {
                return Err(Error::InvalidParameter(format!("self-loop at vertex {a}")));
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        if norm.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("duplicate edge".into()));
        }
        let mut adj = vec![Vec::new(); n];
        for &(x, y) in &norm {
            adj[x as usize].push(y);
            adj[y as usize].push(x);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Self { n, edges: norm, adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// Endpoints of edge `e`.
    pub fn endpoints(&self, e: usize) -> Result<(u32, u32)> {
        self.edges
            .get(e)
            .copied()
            .ok_or(Error::EdgeOutOfRange { edge: e, edge_count: self.edges.len() })
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, x: u32, y: u32) -> bool {
        let (a, b) = (x.min(y), x.max(y));
        self.edges.binary_search(&(a, b)).is_ok()
    }

    /// Number of edges with both endpoints in `s`.
    pub fn induced_edge_count(&self, s: &[usize]) -> Result<usize> {
        let mut in_s = vec![false; self.n];
        for &v in s {
            if v >= self.n {
                return Err(Error::VertexOutOfRange { vertex: v, n: self.n });
            }
            in_s[v] = true;
        }
        Ok(self
            .edges
            .iter()
            .filter(|&&(x, y)| in_s[x as usize] && in_s[y as usize])
            .count())
    }

    /// Edge density `|E| / n`.
    pub fn edge_density(&self) -> f64 {
        self.edges.len() as f64 / self.n as f64
    }

    /// Path on `n` vertices: `0 - 1 - ... - n-1`.
    pub fn path(n: usize) -> Self {
        let edges = (0..n.saturating_sub(1)).map(|i| (i as u32, i as u32 + 1));
        Self::new(n, edges).expect("path is simple")
    }

    /// Cycle on `n >= 3` vertices.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        let edges = (0..n).map(|i| (i as u32, ((i + 1) % n) as u32));
        Self::new(n, edges).expect("cycle is simple")
    }

    /// Complete graph on `n` vertices.
    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for x in 0..n as u32 {
            for y in x + 1..n as u32 {
                edges.push((x, y));
            }
        }
        Self::new(n, edges).expect("complete graph is simple")
    }
}

/// A multigraph produced by the half-edge pairing construction. Self-loops
/// and repeated edges are allowed; a self-loop contributes 2 to its
/// vertex's degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multigraph {
    n: usize,
    edges: Vec<(u32, u32)>,
}

impl Multigraph {
    pub fn new(n: usize, edges: Vec<(u32, u32)>) -> Result<Self> {
        for &(a, b) in &edges {
            let m = a.max(b) as usize;
            if m >= n {
                return Err(Error::VertexOutOfRange { vertex: m, n });
            }
        }
        let edges = edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        Ok(Self { n, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0usize; self.n];
        for &(x, y) in &self.edges {
            d[x as usize] += 1;
            d[y as usize] += 1;
        }
        d
    }

    /// True when there is no self-loop and no repeated edge.
    pub fn is_simple(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.edges.iter().all(|&(x, y)| x != y && seen.insert((x, y)))
    }

    /// Converts to a simple graph; fails if not simple.
    pub fn into_simple(self) -> Result<Graph> {
        if !self.is_simple() {
            return Err(Error::InvalidParameter(
                "multigraph is not simple".into(),
            ));
        }
        Graph::new(self.n, self.edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_self_loops_and_duplicates() {
        assert!(Graph::new(3, [(0, 0)]).is_err());
        assert!(Graph::new(3, [(0, 1), (1, 0)]).is_err());
        assert!(Graph::new(3, [(0, 3)]).is_err());
    }

    #[test]
    fn adjacency_consistent_with_edges() {
        let g = Graph::new(4, [(2, 1), (0, 3), (1, 0)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 3), (1, 2)]);
        assert_eq!(g.neighbors(1), &[0, 2]);
        assert_eq!(g.degree(0), 2);
        assert!(g.has_edge(3, 0));
        assert!(!g.has_edge(2, 3));
    }

    #[test]
    fn induced_edge_count_examples() {
        let k4 = Graph::complete(4);
        assert_eq!(k4.induced_edge_count(&[0, 1, 2]).unwrap(), 3);
        assert_eq!(k4.induced_edge_count(&[1, 2, 3]).unwrap(), 3);
        let p4 = Graph::path(4);
        assert_eq!(p4.induced_edge_count(&[0, 2]).unwrap(), 0);
        assert_eq!(p4.induced_edge_count(&[]).unwrap(), 0);
        assert!(p4.induced_edge_count(&[5]).is_err());
    }

    #[test]
    fn edge_density_examples() {
        assert_eq!(Graph::complete(4).edge_density(), 1.5);
        assert_eq!(Graph::new(5, []).unwrap().edge_density(), 0.0);
        // d-regular graph has density d/2
        assert_eq!(Graph::cycle(6).edge_density(), 1.0);
    }

    #[test]
    fn multigraph_degrees_count_self_loops_twice() {
        let m = Multigraph::new(2, vec![(0, 0), (0, 1)]).unwrap();
        assert_eq!(m.degrees(), vec![3, 1]);
        assert!(!m.is_simple());
        let sum: usize = m.degrees().iter().sum();
        assert_eq!(sum, 2 * m.edges().len());
    }
}
