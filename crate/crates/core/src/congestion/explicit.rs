use std::collections::BTreeMap;

use super::{is_walk, PathSystem};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// A path system given as an explicit table of walks.
#[derive(Debug, Clone)]
pub struct ExplicitPaths {
    graph: Graph,
    paths: BTreeMap<(usize, usize), Vec<usize>>,
}

impl ExplicitPaths {
    /// Every ordered pair of distinct vertices needs an entry; diagonal
    /// entries, if given, must be empty.
    pub fn new(graph: Graph, paths: BTreeMap<(usize, usize), Vec<usize>>) -> Result<Self> {
        let n = graph.n();
        for (&(w0, w1), walk) in &paths {
            graph.check_vertex(w0)?;
            graph.check_vertex(w1)?;
            if (w0 == w1 && !walk.is_empty()) || !is_walk(&graph, w0, w1, walk) {
                return Err(Error::invalid(format!(
                    "entry ({w0},{w1}) is not a walk between its endpoints"
                )));
            }
        }
        for w0 in 0..n {
            for w1 in 0..n {
                if w0 != w1 && !paths.contains_key(&(w0, w1)) {
                    return Err(Error::invalid(format!("missing path for pair ({w0},{w1})")));
                }
            }
        }
        Ok(Self { graph, paths })
    }

    /// One-edge paths between every pair; needs a complete graph.
    pub fn single_edges(graph: &Graph) -> Result<Self> {
        let n = graph.n();
        let mut paths = BTreeMap::new();
        for w0 in 0..n {
            for w1 in 0..n {
                if w0 != w1 {
                    let e = graph
                        .edge_index(w0, w1)
                        .ok_or_else(|| Error::invalid(format!("no edge between {w0} and {w1}")))?;
                    paths.insert((w0, w1), vec![e]);
                }
            }
        }
        Self::new(graph.clone(), paths)
    }
}

impl PathSystem for ExplicitPaths {
    fn graph(&self) -> &Graph {
        &self.graph
    }

    fn path(&self, w0: usize, w1: usize) -> Result<Vec<usize>> {
        self.graph.check_vertex(w0)?;
        self.graph.check_vertex(w1)?;
        Ok(self.paths.get(&(w0, w1)).cloned().unwrap_or_default())
    }

    fn work_estimate(&self) -> u128 {
        self.paths.values().map(|p| p.len() as u128).sum::<u128>() + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families;

    #[test]
    fn rejects_bad_tables() {
        let g = families::path(3);
        let mut paths = BTreeMap::new();
        paths.insert((0, 1), vec![0]);
        assert!(ExplicitPaths::new(g.clone(), paths.clone()).is_err());
        for (a, b, p) in [
            (1, 0, vec![0]),
            (1, 2, vec![1]),
            (2, 1, vec![1]),
            (0, 2, vec![0, 1]),
            (2, 0, vec![1, 0]),
        ] {
            paths.insert((a, b), p);
        }
        assert!(ExplicitPaths::new(g.clone(), paths.clone()).is_ok());
        paths.insert((0, 2), vec![1, 0]);
        assert!(ExplicitPaths::new(g.clone(), paths).is_err());
        assert!(ExplicitPaths::single_edges(&g).is_err());
    }

    #[test]
    fn repeated_edges_count_once() {
        let g = families::path(2);
        let mut paths = BTreeMap::new();
        paths.insert((0, 1), vec![0, 0, 0]);
        paths.insert((1, 0), vec![0]);
        let ps = ExplicitPaths::new(g, paths).unwrap();
        let loads = super::super::naive_loads(&ps).unwrap();
        assert_eq!(loads.m_e, vec![2]);
        assert_eq!(loads.total_path_length, 2);
    }
}
