use std::collections::VecDeque;

use rayon::prelude::*;

use super::{reduce_max, Loads, PathSystem};
use crate::config::Budget;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Shortest paths along the breadth-first tree rooted at `w0`, scanning
/// neighbours in ascending order.
#[derive(Debug, Clone, Copy)]
pub struct BfsPaths<'a> {
    graph: &'a Graph,
}

struct Tree {
    order: Vec<usize>,
    parent_edge: Vec<usize>,
    parent: Vec<usize>,
}

impl<'a> BfsPaths<'a> {
    pub fn new(graph: &'a Graph) -> Self {
        Self { graph }
    }

    fn tree(&self, root: usize) -> Tree {
        let n = self.graph.n();
        let mut parent = vec![usize::MAX; n];
        let mut parent_edge = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::from([root]);
        parent[root] = root;
        while let Some(x) = queue.pop_front() {
            order.push(x);
            for (&y, &e) in self
                .graph
                .neighbors(x)
                .iter()
                .zip(self.graph.incident_edges(x))
            {
                if parent[y] == usize::MAX {
                    parent[y] = x;
                    parent_edge[y] = e;
                    queue.push_back(y);
                }
            }
        }
        Tree {
            order,
            parent_edge,
            parent,
        }
    }

    fn require_connected(&self) -> Result<()> {
        if self.graph.is_connected() {
            Ok(())
        } else {
            Err(Error::Disconnected)
        }
    }
}

impl PathSystem for BfsPaths<'_> {
    fn graph(&self) -> &Graph {
        self.graph
    }

    fn path(&self, w0: usize, w1: usize) -> Result<Vec<usize>> {
        self.graph.check_vertex(w0)?;
        self.graph.check_vertex(w1)?;
        let tree = self.tree(w0);
        if tree.parent[w1] == usize::MAX {
            return Err(Error::Disconnected);
        }
        let mut out = Vec::new();
        let mut x = w1;
        while x != w0 {
            out.push(tree.parent_edge[x]);
            x = tree.parent[x];
        }
        out.reverse();
        Ok(out)
    }

    fn work_estimate(&self) -> u128 {
        let n = self.graph.n() as u128;
        n * (n + self.graph.edge_count() as u128)
    }

    fn loads(&self, budget: &Budget) -> Result<Loads> {
        budget.check_work(self.work_estimate())?;
        self.require_connected()?;
        let g = self.graph;
        let (m_e, total) = (0..g.n())
            .into_par_iter()
            .fold(
                || (vec![0u64; g.edge_count()], 0u128),
                |(mut acc, mut total), root| {
                    let tree = self.tree(root);
                    let mut below = vec![1u64; g.n()];
                    for &x in tree.order.iter().skip(1).rev() {
                        acc[tree.parent_edge[x]] += below[x];
                        total += below[x] as u128;
                        below[tree.parent[x]] += below[x];
                    }
                    (acc, total)
                },
            )
            .reduce(
                || (vec![0u64; g.edge_count()], 0u128),
                |(mut a, ta), (b, tb)| {
                    a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                    (a, ta + tb)
                },
            );
        Ok(Loads {
            m_e,
            total_path_length: total,
        })
    }

    fn max_path_sum(&self, weights: &[f64]) -> Result<(f64, (usize, usize))> {
        self.require_connected()?;
        let g = self.graph;
        Ok(reduce_max((0..g.n()).into_par_iter().map(|root| {
            let tree = self.tree(root);
            let mut sum = vec![0.0; g.n()];
            let mut best = (0.0, (root, root));
            for &x in tree.order.iter().skip(1) {
                sum[x] = sum[tree.parent[x]] + weights[tree.parent_edge[x]];
                if sum[x] > best.0 || (sum[x] == best.0 && x < best.1 .1) {
                    best = (sum[x], (root, x));
                }
            }
            best
        })))
    }
}

#[cfg(test)]
mod tests {
    use super::super::{naive_loads, naive_max_path_sum};
    use super::*;
    use crate::graph::families;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fast_counts_match_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [5, 12, 25] {
            let g = families::connected_gnp(n, 0.25, &mut rng);
            let ps = BfsPaths::new(&g);
            let fast = ps.loads(&Budget::default()).unwrap();
            let slow = naive_loads(&ps).unwrap();
            assert_eq!(fast, slow);
            let w: Vec<f64> = fast.m_e.iter().map(|&m| (m as f64).sqrt()).collect();
            let (a, pa) = ps.max_path_sum(&w).unwrap();
            let (b, _) = naive_max_path_sum(&ps, &w).unwrap();
            assert!((a - b).abs() <= 1e-9 * b.max(1.0));
            let direct: f64 = ps.path(pa.0, pa.1).unwrap().iter().map(|&e| w[e]).sum();
            assert!((direct - a).abs() <= 1e-9 * a.max(1.0));
        }
    }

    #[test]
    fn paths_are_shortest() {
        let g = families::cycle(9);
        let ps = BfsPaths::new(&g);
        assert_eq!(ps.path(0, 4).unwrap().len(), 4);
        assert_eq!(ps.path(0, 5).unwrap().len(), 4);
        assert!(ps.path(3, 3).unwrap().is_empty());
    }

    #[test]
    fn disconnected_rejected() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let ps = BfsPaths::new(&g);
        assert!(matches!(
            ps.loads(&Budget::default()),
            Err(Error::Disconnected)
        ));
        assert!(ps.path(0, 3).is_err());
    }
}
