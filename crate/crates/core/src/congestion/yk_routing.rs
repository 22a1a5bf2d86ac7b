use rayon::prelude::*;
use serde::Serialize;

use super::{reduce_max, Loads, PathSystem};
use crate::config::Budget;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::round_tree::yk::YkGraph;

/// Budget units charged per routed ordered pair by the compressed counter.
const WORK_PER_PAIR: u128 = 8;

/// Pair colouring `Π(x, y) = (label(x)·m + label(y)) mod T` with
/// `m = ⌈√T⌉` and labels alternating along each slice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    pub m: usize,
    pub big_t: usize,
    labels: Vec<u32>,
}

fn ceil_sqrt(t: usize) -> usize {
    let mut m = (t as f64).sqrt() as usize;
    while m * m < t {
        m += 1;
    }
    while m > 0 && (m - 1) * (m - 1) >= t {
        m -= 1;
    }
    m
}

impl Coloring {
    pub fn build(yk: &YkGraph) -> Self {
        let m = ceil_sqrt(yk.big_t);
        let labels = (0..yk.n()).map(|x| (yk.pos_of(x) % m) as u32).collect();
        Self {
            m,
            big_t: yk.big_t,
            labels,
        }
    }

    pub fn label(&self, x: usize) -> usize {
        self.labels[x] as usize
    }

    pub fn color(&self, x: usize, y: usize) -> usize {
        (self.label(x) * self.m + self.label(y)) % self.big_t
    }
}

/// Colour balance statistics for a colouring.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BalanceStats {
    /// `max_{x,t} |{y : Π(x,y) = t}|`.
    pub per_vertex_max: u64,
    /// `max_t |Π^{-1}(t)|`.
    pub per_color_max: u64,
    /// `(HV)^k`.
    pub hv_k: f64,
    /// `|Y_k|² / T`.
    pub pairs_per_color: f64,
}

/// Measured loads against the horizontal and vertical edge estimates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoadDiagnostics {
    pub constant: f64,
    pub horizontal_max_ratio: f64,
    pub vertical_max_ratio: f64,
    pub horizontal_ok: bool,
    pub vertical_ok: bool,
}

/// Routes every pair of `Y_k` through the base path `Y_0`.
#[derive(Debug, Clone)]
pub struct YkRouter<'a> {
    yk: &'a YkGraph,
    coloring: Coloring,
    /// Inclusive position range of each anchor within each slice, indexed
    /// `slice · T + anchor`; `(1, 0)` when absent.
    runs: Vec<(u32, u32)>,
    /// Edge `(x, x+1)` for slice-internal `x`.
    right_edge: Vec<usize>,
}

impl<'a> YkRouter<'a> {
    pub fn new(yk: &'a YkGraph) -> Self {
        let t = yk.big_t;
        let mut runs = vec![(1u32, 0u32); yk.slices.len() * t];
        for (si, s) in yk.slices.iter().enumerate() {
            for (pos, x) in s.vertices().enumerate() {
                let r = &mut runs[si * t + yk.anchor_of(x)];
                if r.0 > r.1 {
                    *r = (pos as u32, pos as u32);
                } else {
                    r.1 = pos as u32;
                }
            }
        }
        let g = &yk.graph;
        let right_edge = (0..yk.n())
            .map(|x| {
                let s = &yk.slices[yk.slice_of(x)];
                if yk.pos_of(x) + 1 < s.len() {
                    g.edge_index(x, x + 1).expect("horizontal edge")
                } else {
                    usize::MAX
                }
            })
            .collect();
        Self {
            yk,
            coloring: Coloring::build(yk),
            runs,
            right_edge,
        }
    }

    pub fn coloring(&self) -> &Coloring {
        &self.coloring
    }

    pub fn yk(&self) -> &YkGraph {
        self.yk
    }

    /// Position in `x`'s slice of the nearest vertex anchored at `b`.
    fn entry_pos(&self, x: usize, b: usize) -> Result<usize> {
        let (lo, hi) = self.runs[self.yk.slice_of(x) * self.yk.big_t + b];
        if lo > hi {
            return Err(Error::invalid(format!(
                "slice of vertex {x} has no vertex above base vertex {b}"
            )));
        }
        Ok(self.yk.pos_of(x).clamp(lo as usize, hi as usize))
    }

    fn chain_len(&self, x: usize) -> usize {
        self.yk.slices[self.yk.slice_of(x)].depth - self.yk.base_depth
    }

    fn horizontal(&self, x: usize, from: usize, to: usize, out: &mut Vec<usize>) {
        let first = self.yk.slices[self.yk.slice_of(x)].first_vertex;
        if from <= to {
            out.extend((from..to).map(|p| self.right_edge[first + p]));
        } else {
            out.extend((to..from).rev().map(|p| self.right_edge[first + p]));
        }
    }

    fn up_chain(&self, mut x: usize) -> Vec<usize> {
        let mut out = Vec::new();
        while let Some(e) = self.yk.parent_edge_of(x) {
            out.push(e);
            x = self.yk.parent_of(x).expect("parent present");
        }
        out
    }

    /// Explicit route from `w0` to `w1` as edge indices.
    pub fn route(&self, w0: usize, w1: usize) -> Result<Vec<usize>> {
        let g = &self.yk.graph;
        g.check_vertex(w0)?;
        g.check_vertex(w1)?;
        if w0 == w1 {
            return Ok(Vec::new());
        }
        let b = self.coloring.color(w0, w1);
        let (p0, p1) = (self.entry_pos(w0, b)?, self.entry_pos(w1, b)?);
        let first0 = self.yk.slices[self.yk.slice_of(w0)].first_vertex;
        let first1 = self.yk.slices[self.yk.slice_of(w1)].first_vertex;
        let mut out = Vec::new();
        self.horizontal(w0, self.yk.pos_of(w0), p0, &mut out);
        out.extend(self.up_chain(first0 + p0));
        let mut down = self.up_chain(first1 + p1);
        down.reverse();
        out.extend(down);
        self.horizontal(w1, p1, self.yk.pos_of(w1), &mut out);
        Ok(out)
    }

    /// Colour balance statistics of the pair colouring.
    pub fn balance(&self) -> BalanceStats {
        let c = &self.coloring;
        let (m, t) = (c.m, c.big_t);
        let mut count = vec![0u64; m];
        for x in 0..self.yk.n() {
            count[c.label(x)] += 1;
        }
        let mut per_vertex_max = 0;
        let mut per_color = vec![0u64; t];
        for a in 0..m {
            let mut row = vec![0u64; t];
            for (l, &cnt) in count.iter().enumerate() {
                row[(a * m + l) % t] += cnt;
            }
            if count[a] > 0 {
                per_vertex_max = per_vertex_max.max(*row.iter().max().unwrap_or(&0));
            }
            for (pc, r) in per_color.iter_mut().zip(&row) {
                *pc += count[a] * r;
            }
        }
        let n = self.yk.n() as f64;
        BalanceStats {
            per_vertex_max,
            per_color_max: *per_color.iter().max().unwrap_or(&0),
            hv_k: ((self.yk.h * self.yk.v) as f64).powi(self.yk.k as i32),
            pairs_per_color: n * n / t as f64,
        }
    }

    /// Compares measured loads with `C·T·H^k·T·(HV)^k` on horizontal edges and
    /// `C·|Y_k|²/T · V^{-⌊(|v| - t)/log₂H⌋}` on vertical edges.
    pub fn diagnostics(&self, loads: &Loads, constant: f64) -> LoadDiagnostics {
        let yk = self.yk;
        let (h, v, k, t) = (yk.h as f64, yk.v as f64, yk.k as i32, yk.big_t as f64);
        let n = yk.n() as f64;
        let horizontal_pred = t * h.powi(k) * t * (h * v).powi(k);
        let mut horizontal_max_ratio: f64 = 0.0;
        for x in 0..yk.n() {
            if self.right_edge[x] != usize::MAX {
                horizontal_max_ratio = horizontal_max_ratio
                    .max(loads.m_e[self.right_edge[x]] as f64 / horizontal_pred);
            }
        }
        let mut vertical_max_ratio: f64 = 0.0;
        for x in 0..yk.n() {
            if let Some(e) = yk.parent_edge_of(x) {
                let decay = ((self.chain_len(x) as f64) / h.log2() + 1e-9).floor();
                let pred = n * n / t * v.powf(-decay);
                vertical_max_ratio = vertical_max_ratio.max(loads.m_e[e] as f64 / pred);
            }
        }
        LoadDiagnostics {
            constant,
            horizontal_max_ratio,
            vertical_max_ratio,
            horizontal_ok: horizontal_max_ratio <= constant,
            vertical_ok: vertical_max_ratio <= constant,
        }
    }

    /// For each anchor `b`, the `w0`-side entry position of `w0`.
    fn entries(&self, x: usize) -> Result<Vec<usize>> {
        (0..self.yk.big_t).map(|b| self.entry_pos(x, b)).collect()
    }
}

/// Edge range `[lo, hi)` of the horizontal segment between two positions.
fn span(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// One pair's route in compressed form: two horizontal spans, two chain
/// starts, and the corrections for edges the two halves share.
struct Shape {
    first0: usize,
    h0: (usize, usize),
    first1: usize,
    h1: (usize, usize),
    x0: usize,
    x1: usize,
    lca: usize,
    /// Shared horizontal edges when both spans lie in one slice.
    overlap: Option<(usize, usize)>,
}

impl YkRouter<'_> {
    fn lca(&self, mut a: usize, mut b: usize) -> usize {
        let (mut da, mut db) = (self.chain_len(a), self.chain_len(b));
        while da > db {
            a = self.yk.parent_of(a).expect("parent present");
            da -= 1;
        }
        while db > da {
            b = self.yk.parent_of(b).expect("parent present");
            db -= 1;
        }
        while a != b {
            a = self.yk.parent_of(a).expect("parent present");
            b = self.yk.parent_of(b).expect("parent present");
        }
        a
    }

    fn shape(&self, w0: usize, w1: usize, b: usize, q0: usize) -> Result<Shape> {
        let yk = self.yk;
        let (s0, s1) = (yk.slice_of(w0), yk.slice_of(w1));
        let first0 = yk.slices[s0].first_vertex;
        let first1 = yk.slices[s1].first_vertex;
        let q1 = self.entry_pos(w1, b)?;
        let h0 = span(yk.pos_of(w0), q0);
        let h1 = span(q1, yk.pos_of(w1));
        let overlap = (s0 == s1)
            .then(|| (h0.0.max(h1.0), h0.1.min(h1.1)))
            .filter(|(lo, hi)| lo < hi);
        let (x0, x1) = (first0 + q0, first1 + q1);
        Ok(Shape {
            first0,
            h0,
            first1,
            h1,
            x0,
            x1,
            lca: self.lca(x0, x1),
            overlap,
        })
    }
}

struct Acc {
    /// Difference array over left endpoints of horizontal edges.
    diff: Vec<i64>,
    /// Signed count of vertical chains starting at each vertex.
    chain: Vec<i64>,
    total: u128,
}

impl Acc {
    fn new(n: usize) -> Self {
        Self {
            diff: vec![0; n + 1],
            chain: vec![0; n],
            total: 0,
        }
    }

    fn segment(&mut self, first: usize, (lo, hi): (usize, usize), count: i64) {
        if lo < hi {
            self.diff[first + lo] += count;
            self.diff[first + hi] -= count;
        }
    }

    fn merge(mut self, other: Acc) -> Acc {
        self.diff
            .iter_mut()
            .zip(&other.diff)
            .for_each(|(a, b)| *a += b);
        self.chain
            .iter_mut()
            .zip(&other.chain)
            .for_each(|(a, b)| *a += b);
        self.total += other.total;
        self
    }
}

impl PathSystem for YkRouter<'_> {
    fn graph(&self) -> &Graph {
        &self.yk.graph
    }

    fn path(&self, w0: usize, w1: usize) -> Result<Vec<usize>> {
        self.route(w0, w1)
    }

    fn work_estimate(&self) -> u128 {
        let n = self.yk.n() as u128;
        n * n * WORK_PER_PAIR
    }

    fn loads(&self, budget: &Budget) -> Result<Loads> {
        budget.check_work(self.work_estimate())?;
        let yk = self.yk;
        let n = yk.n();
        let t = yk.big_t;
        let chunk = (n / (4 * rayon::current_num_threads())).max(1);
        let acc = (0..n)
            .into_par_iter()
            .with_min_len(chunk)
            .try_fold(
                || Acc::new(n),
                |mut acc, w0| {
                    let entries0 = self.entries(w0)?;
                    let la = self.coloring.label(w0);
                    for w1 in 0..n {
                        if w1 == w0 {
                            continue;
                        }
                        let b = (la * self.coloring.m + self.coloring.label(w1)) % t;
                        let sh = self.shape(w0, w1, b, entries0[b])?;
                        acc.segment(sh.first0, sh.h0, 1);
                        acc.segment(sh.first1, sh.h1, 1);
                        acc.chain[sh.x0] += 1;
                        acc.chain[sh.x1] += 1;
                        acc.chain[sh.lca] -= 1;
                        let mut len = (sh.h0.1 - sh.h0.0) + (sh.h1.1 - sh.h1.0);
                        if let Some(ov) = sh.overlap {
                            acc.segment(sh.first0, ov, -1);
                            len -= ov.1 - ov.0;
                        }
                        len +=
                            self.chain_len(sh.x0) + self.chain_len(sh.x1) - self.chain_len(sh.lca);
                        acc.total += len as u128;
                    }
                    Ok::<_, Error>(acc)
                },
            )
            .try_reduce(|| Acc::new(n), |a, b| Ok(a.merge(b)))?;

        let mut m_e = vec![0u64; yk.graph.edge_count()];
        let mut running = 0i64;
        for x in 0..n {
            running += acc.diff[x];
            if self.right_edge[x] != usize::MAX {
                m_e[self.right_edge[x]] = running as u64;
            }
        }
        // Children always carry larger indices than their parents.
        let mut below = acc.chain;
        for x in (0..n).rev() {
            if let (Some(px), Some(e)) = (yk.parent_of(x), yk.parent_edge_of(x)) {
                m_e[e] = below[x] as u64;
                below[px] += below[x];
            }
        }
        Ok(Loads {
            m_e,
            total_path_length: acc.total,
        })
    }

    fn max_path_sum(&self, weights: &[f64]) -> Result<(f64, (usize, usize))> {
        let yk = self.yk;
        let n = yk.n();
        let t = yk.big_t;
        let mut prefix = vec![0.0; n];
        let mut up = vec![0.0; n];
        for x in 0..n {
            if yk.pos_of(x) > 0 {
                prefix[x] = prefix[x - 1] + weights[self.right_edge[x - 1]];
            }
            if let (Some(px), Some(e)) = (yk.parent_of(x), yk.parent_edge_of(x)) {
                up[x] = up[px] + weights[e];
            }
        }
        let seg = |first: usize, (lo, hi): (usize, usize)| prefix[first + hi] - prefix[first + lo];
        let per_w0: Vec<(f64, (usize, usize))> = (0..n)
            .into_par_iter()
            .map(|w0| {
                let entries0 = self.entries(w0)?;
                let la = self.coloring.label(w0);
                let mut best = (f64::NEG_INFINITY, (usize::MAX, usize::MAX));
                for w1 in 0..n {
                    if w1 == w0 {
                        continue;
                    }
                    let b = (la * self.coloring.m + self.coloring.label(w1)) % t;
                    let sh = self.shape(w0, w1, b, entries0[b])?;
                    let mut s = seg(sh.first0, sh.h0) + seg(sh.first1, sh.h1);
                    if let Some(ov) = sh.overlap {
                        s -= seg(sh.first0, ov);
                    }
                    s += up[sh.x0] + up[sh.x1] - up[sh.lca];
                    if s > best.0 {
                        best = (s, (w0, w1));
                    }
                }
                Ok(best)
            })
            .collect::<Result<_>>()?;
        Ok(reduce_max(per_w0.into_par_iter()))
    }
}

#[cfg(test)]
mod tests {
    use super::super::{is_walk, lemma_bound, naive_loads, naive_max_path_sum};
    use super::*;

    fn yk(h: usize, v: usize, p: f64, k: usize) -> YkGraph {
        YkGraph::build(h, v, p, k, &Budget::default()).unwrap()
    }

    #[test]
    fn coloring_examples() {
        assert_eq!(ceil_sqrt(4), 2);
        assert_eq!(ceil_sqrt(5), 3);
        assert_eq!(ceil_sqrt(2), 2);
        assert_eq!(ceil_sqrt(1), 1);
        let y = yk(2, 2, 1.0, 2);
        assert_eq!(y.big_t, 4);
        let c = Coloring::build(&y);
        assert_eq!(c.m, 2);
        let long = y.slices.iter().find(|s| s.len() == 8).unwrap();
        let labels: Vec<usize> = long.vertices().map(|x| c.label(x)).collect();
        assert_eq!(labels, vec![0, 1, 0, 1, 0, 1, 0, 1]);
        let (x, z) = (long.first_vertex + 1, long.first_vertex);
        assert_eq!(c.color(x, z), 2);
        let y1 = yk(2, 2, 1.0, 1);
        let c1 = Coloring::build(&y1);
        for a in 0..y1.n() {
            for b in 0..y1.n() {
                assert!(c1.color(a, b) < 2);
            }
        }
    }

    #[test]
    fn routes_are_walks_with_bounded_length() {
        let y = yk(2, 2, 1.0, 1);
        assert_eq!(y.n(), 10);
        let r = YkRouter::new(&y);
        let limit = y.big_t * y.h + 2 * y.k + y.big_t;
        for w0 in 0..y.n() {
            for w1 in 0..y.n() {
                let path = r.route(w0, w1).unwrap();
                assert!(is_walk(&y.graph, w0, w1, &path), "{w0}->{w1}");
                assert!(path.len() <= limit);
                assert!(r.edge_set(w0, w1).unwrap().len() <= path.len());
                assert_eq!(path.is_empty(), w0 == w1);
            }
        }
    }

    #[test]
    fn base_pairs_route_horizontally() {
        let y = yk(2, 2, 1.0, 3);
        let r = YkRouter::new(&y);
        for w0 in 0..y.big_t {
            for w1 in 0..y.big_t {
                let path = r.route(w0, w1).unwrap();
                let b = r.coloring().color(w0, w1);
                let expected = w0.abs_diff(b) + b.abs_diff(w1);
                if w0 != w1 {
                    assert_eq!(path.len(), expected);
                }
            }
        }
    }

    #[test]
    fn symmetric_when_colors_agree() {
        let y = yk(2, 2, 1.0, 2);
        let r = YkRouter::new(&y);
        let c = r.coloring();
        for w0 in 0..y.n() {
            for w1 in 0..y.n() {
                if c.color(w0, w1) == c.color(w1, w0) {
                    let mut back = r.route(w1, w0).unwrap();
                    back.reverse();
                    assert_eq!(r.route(w0, w1).unwrap(), back);
                }
            }
        }
    }

    #[test]
    fn compressed_counts_match_naive() {
        for (h, v, p, k) in [
            (2, 2, 1.0, 1),
            (2, 2, 1.0, 2),
            (2, 2, 1.5, 3),
            (3, 2, 1.2, 2),
            (2, 3, 1.5, 1),
            (3, 3, 1.0, 1),
        ] {
            let y = yk(h, v, p, k);
            let r = YkRouter::new(&y);
            let fast = r.loads(&Budget::default()).unwrap();
            let slow = naive_loads(&r).unwrap();
            assert_eq!(fast, slow, "({h},{v},{p},{k})");
            assert_eq!(fast.sum(), fast.total_path_length);
            let w: Vec<f64> = fast
                .m_e
                .iter()
                .map(|&m| (m as f64).powf(1.0 / (p.max(1.5) - 1.0)))
                .collect();
            let (a, pa) = r.max_path_sum(&w).unwrap();
            let (b, _) = naive_max_path_sum(&r, &w).unwrap();
            assert!((a - b).abs() <= 1e-9 * b, "({h},{v},{p},{k}): {a} vs {b}");
            let direct: f64 = r.edge_set(pa.0, pa.1).unwrap().iter().map(|&e| w[e]).sum();
            assert!((direct - a).abs() <= 1e-9 * a);
        }
    }

    #[test]
    fn y1_bound_example() {
        let y = yk(2, 2, 1.0, 1);
        let r = YkRouter::new(&y);
        let loads = r.loads(&Budget::default()).unwrap();
        let cert = lemma_bound(&r, &loads, 1.0).unwrap();
        assert_eq!(cert.bound, 10.0 / loads.max().0 as f64);
        let h1 = crate::poincare::h1_sweep(&y.graph).unwrap().value;
        assert!(cert.bound <= h1 + 1e-9);
    }

    #[test]
    fn balance_and_diagnostics() {
        let y = yk(2, 2, 1.0, 3);
        let r = YkRouter::new(&y);
        let bal = r.balance();
        let n = y.n() as u64;
        assert!(bal.per_color_max * y.big_t as u64 >= n * n);
        assert!(bal.per_vertex_max <= n);
        let loads = r.loads(&Budget::default()).unwrap();
        let d = r.diagnostics(&loads, 64.0);
        assert!(d.horizontal_ok && d.vertical_ok, "{d:?}");
    }

    #[test]
    fn budget_is_enforced() {
        let y = yk(2, 2, 1.0, 2);
        let r = YkRouter::new(&y);
        let b = Budget {
            vertices: 1 << 20,
            work: 100,
        };
        assert!(r.loads(&b).unwrap_err().is_budget());
    }
}
