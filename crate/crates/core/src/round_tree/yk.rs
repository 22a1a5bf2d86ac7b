//! The witness subgraphs `Y_k` inside a round tree.
//!
//! `Y_0` is a horizontal path of `T` vertices at depth `t` over the
//! all-zero `v`-word. Each stage extends every maximal slice (the vertices
//! sharing a `v`-word) in every vertical direction `β`, appending zero
//! letters until the new slice reaches `T·H^i` vertices.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{code_to_word, word_to_string, EdgeKind, RtAddress};
use crate::config::Budget;
use crate::error::{Error, Result};
use crate::graph::{Graph, GraphJson};
use crate::profiles::q_of;

/// Vertices sharing one `v`-word, in lexicographic order of `h`-words.
#[derive(Debug, Clone, Serialize)]
pub struct YkSlice {
    /// Construction stage `i ∈ [0, k]` that created the slice.
    pub stage: usize,
    /// Word length of every vertex in the slice.
    pub depth: usize,
    pub v_word: Vec<u8>,
    /// Base-`H` codes of the `h`-words, ascending.
    pub h_codes: Vec<u64>,
    pub first_vertex: usize,
    /// Index of the slice this one was extended from.
    pub parent_slice: Option<usize>,
}

impl YkSlice {
    pub fn len(&self) -> usize {
        self.h_codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h_codes.is_empty()
    }

    pub fn vertices(&self) -> std::ops::Range<usize> {
        self.first_vertex..self.first_vertex + self.h_codes.len()
    }
}

#[derive(Debug, Clone)]
pub struct YkGraph {
    pub graph: Graph,
    pub h: usize,
    pub v: usize,
    pub p: f64,
    pub k: usize,
    /// Length of the base path `Y_0`.
    pub big_t: usize,
    /// Depth of `Y_0` in the ambient round tree.
    pub base_depth: usize,
    pub slices: Vec<YkSlice>,
    slice_of: Vec<u32>,
    pos_of: Vec<u32>,
    parent: Vec<usize>,
    parent_edge: Vec<usize>,
    anchor: Vec<u32>,
}

/// `T = max(2, round(H^{k(Q-p)/p}))`.
pub fn base_length(h: usize, v: usize, p: f64, k: usize) -> Result<usize> {
    let q = q_of(h, v)?;
    if !(p >= 1.0 && p < q) {
        return Err(Error::invalid(format!(
            "need 1 <= p < Q = {q}, got p = {p}"
        )));
    }
    let t = (h as f64).powf(k as f64 * (q - p) / p).round();
    if !t.is_finite() || t > 1e15 {
        return Err(Error::Budget {
            what: "vertex",
            projected: u128::MAX,
            budget: 0,
        });
    }
    Ok((t as usize).max(2))
}

/// Smallest `t` with `H^t >= T`.
fn base_depth(h: usize, big_t: usize) -> usize {
    let mut t = 0;
    let mut reach = 1usize;
    while reach < big_t {
        reach *= h;
        t += 1;
    }
    t
}

pub const NO_PARENT: usize = usize::MAX;

impl YkGraph {
    /// Builds `Y_k` inside the regular round tree `RT^{H,V}`.
    pub fn build(h: usize, v: usize, p: f64, k: usize, budget: &Budget) -> Result<Self> {
        Self::build_with_branching(h, v, p, k, budget, |_, _, _, _| h)
    }

    /// Builds `Y_k` inside a round tree whose branching below `(h, v)` in
    /// direction `β` is `branching(h_code, depth, v_word, β) ∈ [2, H]`.
    pub fn build_with_branching<F>(
        h: usize,
        v: usize,
        p: f64,
        k: usize,
        budget: &Budget,
        branching: F,
    ) -> Result<Self>
    where
        F: Fn(u64, usize, &[u8], usize) -> usize,
    {
        if k < 1 {
            return Err(Error::invalid("k must be >= 1"));
        }
        if v < 2 {
            return Err(Error::invalid("Y_k needs vertical branching V >= 2"));
        }
        let big_t = base_length(h, v, p, k)?;
        let t = base_depth(h, big_t);

        // Regular projection: T · Σ (HV)^i. Irregular trees can only be smaller
        // per stage, but may insert extra zero-extension levels; the running
        // count below catches those.
        let projected = (0..=k).try_fold(0u128, |acc, i| {
            acc.checked_add((big_t as u128).checked_mul(((h * v) as u128).checked_pow(i as u32)?)?)
        });
        budget.check_vertices(projected.unwrap_or(u128::MAX))?;

        let mut slices = vec![YkSlice {
            stage: 0,
            depth: t,
            v_word: vec![0; t],
            h_codes: (0..big_t as u64).collect(),
            first_vertex: 0,
            parent_slice: None,
        }];
        let mut total = big_t;
        let mut frontier = vec![0usize];
        let mut target = big_t as u128;
        for stage in 1..=k {
            target *= h as u128;
            let mut next = Vec::new();
            for &s in &frontier {
                for beta in 0..v {
                    let mut cur = s;
                    let mut letter = beta;
                    loop {
                        let child = extend(&slices[cur], cur, letter, h, stage, total, &branching)?;
                        total += child.len();
                        budget.check_vertices(total as u128)?;
                        let len = child.len();
                        slices.push(child);
                        cur = slices.len() - 1;
                        letter = 0;
                        if len as u128 >= target {
                            break;
                        }
                    }
                    next.push(cur);
                }
            }
            frontier = next;
        }

        let n = total;
        let mut slice_of = vec![0u32; n];
        let mut pos_of = vec![0u32; n];
        let mut parent = vec![NO_PARENT; n];
        let mut anchor = vec![0u32; n];
        let mut edges = Vec::with_capacity(2 * n);
        for (si, s) in slices.iter().enumerate() {
            for (pos, &code) in s.h_codes.iter().enumerate() {
                let x = s.first_vertex + pos;
                slice_of[x] = si as u32;
                pos_of[x] = pos as u32;
                if pos + 1 < s.len() {
                    edges.push((x, x + 1));
                }
                match s.parent_slice {
                    None => anchor[x] = pos as u32,
                    Some(ps) => {
                        let parent_slice = &slices[ps];
                        let ppos = parent_slice
                            .h_codes
                            .binary_search(&(code / h as u64))
                            .map_err(|_| Error::invalid("slice vertex without vertical parent"))?;
                        let px = parent_slice.first_vertex + ppos;
                        parent[x] = px;
                        anchor[x] = anchor[px];
                        edges.push((px, x));
                    }
                }
            }
        }
        edges.sort_unstable();
        let graph = Graph::from_canonical(n, edges);
        let parent_edge = (0..n)
            .map(|x| {
                if parent[x] == NO_PARENT {
                    NO_PARENT
                } else {
                    graph.edge_index(parent[x], x).expect("parent edge present")
                }
            })
            .collect();
        Ok(YkGraph {
            graph,
            h,
            v,
            p,
            k,
            big_t,
            base_depth: t,
            slices,
            slice_of,
            pos_of,
            parent,
            parent_edge,
            anchor,
        })
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn slice_of(&self, x: usize) -> usize {
        self.slice_of[x] as usize
    }

    /// Horizontal index of `x` within its slice.
    pub fn pos_of(&self, x: usize) -> usize {
        self.pos_of[x] as usize
    }

    /// Vertical parent inside `Y_k`, or `None` on `Y_0`.
    pub fn parent_of(&self, x: usize) -> Option<usize> {
        (self.parent[x] != NO_PARENT).then_some(self.parent[x])
    }

    pub fn parent_edge_of(&self, x: usize) -> Option<usize> {
        (self.parent_edge[x] != NO_PARENT).then_some(self.parent_edge[x])
    }

    /// Position in `Y_0` of the depth-`t` ancestor of `x`.
    pub fn anchor_of(&self, x: usize) -> usize {
        self.anchor[x] as usize
    }

    pub fn level_of(&self, x: usize) -> usize {
        self.slices[self.slice_of(x)].stage
    }

    pub fn address(&self, x: usize) -> RtAddress {
        let s = &self.slices[self.slice_of(x)];
        RtAddress::new(
            code_to_word(s.h_codes[self.pos_of(x)], self.h, s.depth),
            s.v_word.clone(),
        )
    }

    pub fn labels(&self) -> BTreeMap<usize, String> {
        (0..self.n())
            .map(|x| (x, self.address(x).label()))
            .collect()
    }

    /// Index of `x` in [`super::build_round_tree`]'s numbering of the regular
    /// tree `RT^{H,V}` truncated at depth `base_depth + k`.
    pub fn base_index(&self, x: usize) -> usize {
        let s = &self.slices[self.slice_of(x)];
        let hv = self.h * self.v;
        let offset: usize = (0..s.depth).map(|l| hv.pow(l as u32)).sum();
        let v_code = s
            .v_word
            .iter()
            .fold(0usize, |acc, &d| acc * self.v + d as usize);
        offset + v_code * self.h.pow(s.depth as u32) + s.h_codes[self.pos_of(x)] as usize
    }

    /// Number of vertices at each construction stage.
    pub fn stage_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k + 1];
        for s in &self.slices {
            sizes[s.stage] += s.len();
        }
        sizes
    }

    /// Structural invariants of the construction, as a list of violations.
    pub fn check_invariants(&self) -> Vec<String> {
        let mut problems = Vec::new();
        if !self.graph.is_connected() {
            problems.push("Y_k is disconnected".into());
        }
        let ratio =
            self.n() as f64 / (self.big_t as f64 * ((self.h * self.v) as f64).powi(self.k as i32));
        if !(1.0..=4.0).contains(&ratio) {
            problems.push(format!("|Y_k| / T(HV)^k = {ratio} outside [1, 4]"));
        }
        for (si, s) in self.slices.iter().enumerate() {
            if s.h_codes.windows(2).any(|w| w[0] >= w[1]) {
                problems.push(format!("slice {si} not sorted"));
            }
            for x in s.vertices().skip(1) {
                if !self.graph.has_edge(x - 1, x) {
                    problems.push(format!("slice {si} is not a horizontal path at {x}"));
                }
            }
            if s.stage >= 1 {
                let lo = self.big_t as u128 * (self.h as u128).pow(s.stage as u32 - 1);
                let is_maximal = !self
                    .slices
                    .iter()
                    .any(|c| c.parent_slice == Some(si) && c.stage == s.stage);
                if is_maximal && (s.len() as u128) < lo * self.h as u128 {
                    problems.push(format!("maximal slice {si} shorter than T·H^i"));
                }
            }
        }
        for x in 0..self.n() {
            if let Some(px) = self.parent_of(x) {
                let (sx, sp) = (self.slice_of(x), self.slice_of(px));
                if self.slices[sx].depth != self.slices[sp].depth + 1 {
                    problems.push(format!("parent of {x} not one level up"));
                }
            } else if self.slice_of(x) != 0 {
                problems.push(format!("vertex {x} outside Y_0 lacks a parent"));
            }
        }
        problems
    }

    /// Graph JSON with address labels and edge kinds.
    pub fn to_json(&self) -> GraphJson {
        let mut j = GraphJson::from_graph(&self.graph).with_labels(self.labels());
        let kinds = self
            .graph
            .edges()
            .iter()
            .map(|&(u, v)| {
                let kind = if self.parent_of(v) == Some(u) {
                    EdgeKind::Vertical
                } else {
                    EdgeKind::Horizontal
                };
                kind.as_str().to_string()
            })
            .collect();
        j.edge_kinds = Some(kinds);
        j
    }

    /// Human-readable description of a slice's `v`-word.
    pub fn slice_label(&self, s: usize) -> String {
        word_to_string(&self.slices[s].v_word)
    }
}

fn extend<F>(
    parent: &YkSlice,
    parent_index: usize,
    beta: usize,
    h: usize,
    stage: usize,
    first_vertex: usize,
    branching: &F,
) -> Result<YkSlice>
where
    F: Fn(u64, usize, &[u8], usize) -> usize,
{
    let mut h_codes = Vec::with_capacity(parent.len() * h);
    for &code in &parent.h_codes {
        let delta = branching(code, parent.depth, &parent.v_word, beta);
        if !(2..=h).contains(&delta) {
            return Err(Error::invalid(format!(
                "branching {delta} outside [2, {h}]"
            )));
        }
        let base = code
            .checked_mul(h as u64)
            .ok_or_else(|| Error::invalid("h-word code overflow"))?;
        h_codes.extend((0..delta as u64).map(|a| base + a));
    }
    let mut v_word = parent.v_word.clone();
    v_word.push(beta as u8);
    Ok(YkSlice {
        stage,
        depth: parent.depth + 1,
        v_word,
        h_codes,
        first_vertex,
        parent_slice: Some(parent_index),
    })
}
