//! Finite simple undirected graphs with stable vertex and edge indexing.
//!
//! Edges are stored canonically (`u < v`) and sorted, so an edge index is a
//! stable key for per-edge data such as congestion loads. Per-vertex
//! neighbour lists are sorted and carry the index of the connecting edge.

mod io;
pub(crate) mod norms;

pub use io::{GraphJson, ParsedDot};
pub use norms::{check_norm_inequalities, gradient_norm, lp_norm, NormCheck, REL_TOL};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    neighbor_edges: Vec<usize>,
    max_degree: usize,
}

impl Graph {
    /// Builds a graph from an edge list. Endpoints may be given in either
    /// order; self-loops, duplicates and out-of-range endpoints are errors.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut canon = Vec::new();
        for (u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { index: x, n });
                }
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop at vertex {u}")));
            }
            canon.push((u.min(v), u.max(v)));
        }
        canon.sort_unstable();
        if let Some(w) = canon.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::invalid(format!("duplicate edge {:?}", w[0])));
        }
        Ok(Self::from_canonical(n, canon))
    }

    /// `edges` must be sorted, deduplicated and have `u < v < n`.
    pub(crate) fn from_canonical(n: usize, edges: Vec<(usize, usize)>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        let mut degree = vec![0usize; n];
        for &(u, v) in &edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut neighbors = vec![0; 2 * edges.len()];
        let mut neighbor_edges = vec![0; 2 * edges.len()];
        for (e, &(u, v)) in edges.iter().enumerate() {
            neighbors[fill[u]] = v;
            neighbor_edges[fill[u]] = e;
            fill[u] += 1;
            neighbors[fill[v]] = u;
            neighbor_edges[fill[v]] = e;
            fill[v] += 1;
        }
        for x in 0..n {
            let range = offsets[x]..offsets[x + 1];
            let mut pairs: Vec<(usize, usize)> = neighbors[range.clone()]
                .iter()
                .copied()
                .zip(neighbor_edges[range.clone()].iter().copied())
                .collect();
            pairs.sort_unstable();
            for (slot, (w, e)) in range.zip(pairs) {
                neighbors[slot] = w;
                neighbor_edges[slot] = e;
            }
        }
        let max_degree = degree.iter().copied().max().unwrap_or(0);
        Graph {
            n,
            edges,
            offsets,
            neighbors,
            neighbor_edges,
            max_degree,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn degree(&self, x: usize) -> usize {
        self.offsets[x + 1] - self.offsets[x]
    }

    /// Sorted neighbours of `x`.
    pub fn neighbors(&self, x: usize) -> &[usize] {
        &self.neighbors[self.offsets[x]..self.offsets[x + 1]]
    }

    /// Edge indices aligned with [`Graph::neighbors`].
    pub fn incident_edges(&self, x: usize) -> &[usize] {
        &self.neighbor_edges[self.offsets[x]..self.offsets[x + 1]]
    }

    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        if u >= self.n || v >= self.n {
            return None;
        }
        let nb = self.neighbors(u);
        nb.binary_search(&v).ok().map(|i| self.incident_edges(u)[i])
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_index(u, v).is_some()
    }

    pub(crate) fn check_vertex(&self, x: usize) -> Result<()> {
        if x >= self.n {
            return Err(Error::VertexOutOfRange {
                index: x,
                n: self.n,
            });
        }
        Ok(())
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || components(self, &vec![false; self.n])[0].len() == self.n
    }

    /// The graph induced on `s` (deduplicated, ascending), with the remap
    /// table from new to original indices.
    pub fn induced_subgraph(&self, s: &[usize]) -> Result<InducedSubgraph> {
        let mut original: Vec<usize> = s.to_vec();
        for &x in &original {
            self.check_vertex(x)?;
        }
        original.sort_unstable();
        original.dedup();
        let mut new_index = vec![usize::MAX; self.n];
        for (i, &x) in original.iter().enumerate() {
            new_index[x] = i;
        }
        let mut edges = Vec::new();
        for &(u, v) in &self.edges {
            let (a, b) = (new_index[u], new_index[v]);
            if a != usize::MAX && b != usize::MAX {
                edges.push((a.min(b), a.max(b)));
            }
        }
        edges.sort_unstable();
        Ok(InducedSubgraph {
            graph: Graph::from_canonical(original.len(), edges),
            original,
        })
    }

    /// Sizes of the connected components of `self - s`, largest first.
    pub fn components_after_removal(&self, s: &[usize]) -> Result<Vec<usize>> {
        let mut removed = vec![false; self.n];
        for &x in s {
            self.check_vertex(x)?;
            removed[x] = true;
        }
        let mut sizes: Vec<usize> = components(self, &removed).iter().map(Vec::len).collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        Ok(sizes)
    }
}

#[derive(Debug, Clone)]
pub struct InducedSubgraph {
    pub graph: Graph,
    /// `original[i]` is the index in the parent graph of new vertex `i`.
    pub original: Vec<usize>,
}

/// Connected components of the graph restricted to vertices with
/// `removed[x] == false`, in order of their smallest vertex. Iterative.
pub fn components(g: &Graph, removed: &[bool]) -> Vec<Vec<usize>> {
    let mut seen = removed.to_vec();
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for start in 0..g.n() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let mut comp = Vec::new();
        while let Some(x) = stack.pop() {
            comp.push(x);
            for &y in g.neighbors(x) {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Real values indexed by vertex.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct VertexFunction(Vec<f64>);

impl VertexFunction {
    pub fn new(g: &Graph, values: Vec<f64>) -> Result<Self> {
        if values.len() != g.n() {
            return Err(Error::invalid(format!(
                "vertex function has {} values for {} vertices",
                values.len(),
                g.n()
            )));
        }
        Ok(VertexFunction(values))
    }

    pub(crate) fn from_vec(values: Vec<f64>) -> Self {
        VertexFunction(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mean(&self) -> f64 {
        if self.0.is_empty() {
            return 0.0;
        }
        self.0.iter().sum::<f64>() / self.0.len() as f64
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Small named families used throughout tests and the CLI.
pub mod families {
    use super::Graph;

    pub fn path(n: usize) -> Graph {
        Graph::from_canonical(n, (1..n).map(|i| (i - 1, i)).collect())
    }

    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        edges.push((0, n - 1));
        edges.sort_unstable();
        Graph::from_canonical(n, edges)
    }

    pub fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Graph::from_canonical(n, edges)
    }

    /// Star with centre 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> Graph {
        Graph::from_canonical(leaves + 1, (1..=leaves).map(|i| (0, i)).collect())
    }

    /// Erdős–Rényi G(n, prob) drawn from `rng`.
    pub fn gnp<R: rand::Rng>(n: usize, prob: f64, rng: &mut R) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen::<f64>() < prob {
                    edges.push((u, v));
                }
            }
        }
        Graph::from_canonical(n, edges)
    }

    /// Rejection-samples G(n, prob) until connected.
    pub fn connected_gnp<R: rand::Rng>(n: usize, prob: f64, rng: &mut R) -> Graph {
        loop {
            let g = gnp(n, prob, rng);
            if g.is_connected() {
                return g;
            }
        }
    }

    /// Uniform random labelled tree via a Prüfer-free attachment process:
    /// vertex `i` attaches to a uniform earlier vertex.
    pub fn random_tree<R: rand::Rng>(n: usize, rng: &mut R) -> Graph {
        let edges = (1..n).map(|i| (rng.gen_range(0..i), i));
        Graph::from_edges(n, edges).expect("attachment tree is simple")
    }
}
