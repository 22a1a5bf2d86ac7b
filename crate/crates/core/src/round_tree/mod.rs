//! Round tree graphs on address pairs `(h, v) ∈ [H]* × [V]*`.
//!
//! Vertical edges join `(h, v)` to `(hα, vβ)`; horizontal edges join
//! lexicographically consecutive `h`-words sharing the same `v`-word.

pub mod yk;

pub use yk::{YkGraph, YkSlice};

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::config::Budget;
use crate::error::{Error, Result};
use crate::graph::{Graph, GraphJson};

/// A vertex address. Letters are stored as small integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RtAddress {
    pub h_word: Vec<u8>,
    pub v_word: Vec<u8>,
}

impl RtAddress {
    pub fn new(h_word: Vec<u8>, v_word: Vec<u8>) -> Self {
        RtAddress { h_word, v_word }
    }

    pub fn root() -> Self {
        RtAddress::new(Vec::new(), Vec::new())
    }

    pub fn level(&self) -> usize {
        self.h_word.len()
    }

    /// `(h, v)` with the last letter of each word removed.
    pub fn parent(&self) -> Option<RtAddress> {
        if self.h_word.is_empty() || self.v_word.is_empty() {
            return None;
        }
        Some(RtAddress::new(
            self.h_word[..self.h_word.len() - 1].to_vec(),
            self.v_word[..self.v_word.len() - 1].to_vec(),
        ))
    }

    /// Label form `h=<word>;v=<word>`, letters as base-36 digits.
    pub fn label(&self) -> String {
        format!(
            "h={};v={}",
            word_to_string(&self.h_word),
            word_to_string(&self.v_word)
        )
    }

    pub fn parse_label(label: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("bad round-tree label {label:?}"));
        let (h, v) = label.split_once(';').ok_or_else(bad)?;
        let h = h.strip_prefix("h=").ok_or_else(bad)?;
        let v = v.strip_prefix("v=").ok_or_else(bad)?;
        Ok(RtAddress::new(string_to_word(h)?, string_to_word(v)?))
    }
}

pub(crate) fn word_to_string(w: &[u8]) -> String {
    w.iter()
        .map(|&d| std::char::from_digit(d as u32, 36).expect("letter below 36"))
        .collect()
}

fn string_to_word(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| {
            c.to_digit(36)
                .map(|d| d as u8)
                .ok_or_else(|| Error::invalid(format!("bad word letter {c:?}")))
        })
        .collect()
}

/// Digits of `code` in base `radix`, most significant first, padded to `len`.
pub(crate) fn code_to_word(mut code: u64, radix: usize, len: usize) -> Vec<u8> {
    let mut w = vec![0u8; len];
    for slot in w.iter_mut().rev() {
        *slot = (code % radix as u64) as u8;
        code /= radix as u64;
    }
    w
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Horizontal,
    Vertical,
}

impl EdgeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::Horizontal => "horizontal",
            EdgeKind::Vertical => "vertical",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "horizontal" => Ok(EdgeKind::Horizontal),
            "vertical" => Ok(EdgeKind::Vertical),
            other => Err(Error::invalid(format!("unknown edge kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RoundTreeGraph {
    pub graph: Graph,
    pub addresses: Vec<RtAddress>,
    /// Aligned with `graph.edges()`.
    pub edge_kinds: Vec<EdgeKind>,
    pub h: usize,
    pub v: usize,
    pub depth: usize,
}

fn checked_pow(base: usize, exp: usize) -> Option<u128> {
    (base as u128).checked_pow(exp as u32)
}

/// Number of vertices of the regular round tree up to `depth`.
pub fn round_tree_size(h: usize, v: usize, depth: usize) -> Option<u128> {
    (0..=depth).try_fold(0u128, |acc, l| acc.checked_add(checked_pow(h * v, l)?))
}

/// The `(H, V)`-regular round tree truncated at `depth`.
///
/// Vertices are numbered level by level; within a level by `v`-word, then
/// by `h`-word, both in lexicographic order.
pub fn build_round_tree(
    h: usize,
    v: usize,
    depth: usize,
    budget: &Budget,
) -> Result<RoundTreeGraph> {
    if h < 2 {
        return Err(Error::invalid(format!(
            "horizontal branching must be >= 2, got {h}"
        )));
    }
    if v < 1 {
        return Err(Error::invalid("vertical branching must be >= 1"));
    }
    if h > 36 || v > 36 {
        return Err(Error::invalid(
            "branching above 36 is not representable in labels",
        ));
    }
    let projected = round_tree_size(h, v, depth).unwrap_or(u128::MAX);
    budget.check_vertices(projected)?;
    let n = projected as usize;

    let mut offsets = Vec::with_capacity(depth + 2);
    offsets.push(0usize);
    for l in 0..=depth {
        offsets.push(offsets[l] + (h * v).pow(l as u32));
    }
    let id = |level: usize, vc: usize, hc: usize| offsets[level] + vc * h.pow(level as u32) + hc;

    let mut addresses = Vec::with_capacity(n);
    let mut edges = Vec::new();
    for level in 0..=depth {
        let hn = h.pow(level as u32);
        let vn = v.pow(level as u32);
        for vc in 0..vn {
            let v_word = code_to_word(vc as u64, v, level);
            for hc in 0..hn {
                addresses.push(RtAddress::new(
                    code_to_word(hc as u64, h, level),
                    v_word.clone(),
                ));
                let me = id(level, vc, hc);
                if hc + 1 < hn {
                    edges.push((me, me + 1));
                }
                if level < depth {
                    for beta in 0..v {
                        for alpha in 0..h {
                            edges.push((me, id(level + 1, vc * v + beta, hc * h + alpha)));
                        }
                    }
                }
            }
        }
    }
    edges.sort_unstable();
    let graph = Graph::from_canonical(n, edges);
    let edge_kinds = graph
        .edges()
        .iter()
        .map(|&(a, b)| {
            if addresses[a].level() == addresses[b].level() {
                EdgeKind::Horizontal
            } else {
                EdgeKind::Vertical
            }
        })
        .collect();
    Ok(RoundTreeGraph {
        graph,
        addresses,
        edge_kinds,
        h,
        v,
        depth,
    })
}

/// `RT^{H,1}`, the dual graph of a hyperbolic half-plane tiled by annuli.
pub fn build_half_plane(h: usize, depth: usize, budget: &Budget) -> Result<RoundTreeGraph> {
    build_round_tree(h, 1, depth, budget)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub axiom: u8,
    pub description: &'static str,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<AxiomCheck>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, axiom: u8) -> &AxiomCheck {
        self.checks
            .iter()
            .find(|c| c.axiom == axiom)
            .expect("axiom 1..=5")
    }
}

const AXIOMS: [&str; 5] = [
    "h-word and v-word have equal length",
    "every non-root vertex has its vertical parent, joined by a vertical edge",
    "admissible horizontal letters below (h,v,beta) form [Delta] with 2 <= Delta <= H",
    "consecutive h-words over a common v-word are joined by a horizontal edge",
    "every edge is vertical or horizontal",
];

impl RoundTreeGraph {
    pub fn labels(&self) -> BTreeMap<usize, String> {
        self.addresses
            .iter()
            .enumerate()
            .map(|(i, a)| (i, a.label()))
            .collect()
    }

    pub fn to_json(&self) -> GraphJson {
        let mut j = GraphJson::from_graph(&self.graph).with_labels(self.labels());
        j.edge_kinds = Some(
            self.edge_kinds
                .iter()
                .map(|k| k.as_str().to_string())
                .collect(),
        );
        j
    }

    /// Reads a labelled graph. Missing `edge_kinds` are inferred from levels;
    /// `H`/`V` default to one more than the largest letter seen (minimum 2/1).
    pub fn from_json(j: &GraphJson, h: Option<usize>, v: Option<usize>) -> Result<Self> {
        let graph = j.to_graph()?;
        let labels = j
            .labels
            .as_ref()
            .ok_or_else(|| Error::invalid("round-tree JSON needs vertex labels"))?;
        let addresses = (0..graph.n())
            .map(|x| {
                labels
                    .get(&x)
                    .ok_or_else(|| Error::invalid(format!("vertex {x} has no label")))
                    .and_then(|l| RtAddress::parse_label(l))
            })
            .collect::<Result<Vec<_>>>()?;
        // Kinds in the JSON follow its edge order; re-align to canonical order.
        let edge_kinds = match &j.edge_kinds {
            Some(kinds) => {
                let mut by_edge = HashMap::new();
                for (e, k) in j.edges.iter().zip(kinds) {
                    by_edge.insert((e[0].min(e[1]), e[0].max(e[1])), EdgeKind::parse(k)?);
                }
                graph.edges().iter().map(|e| by_edge[e]).collect()
            }
            None => graph
                .edges()
                .iter()
                .map(|&(a, b)| {
                    if addresses[a].level() == addresses[b].level() {
                        EdgeKind::Horizontal
                    } else {
                        EdgeKind::Vertical
                    }
                })
                .collect(),
        };
        let max_letter = |f: fn(&RtAddress) -> &Vec<u8>| {
            addresses
                .iter()
                .flat_map(|a| f(a).iter().copied())
                .max()
                .map_or(0, |m| m as usize + 1)
        };
        let h = h.unwrap_or_else(|| max_letter(|a| &a.h_word).max(2));
        let v = v.unwrap_or_else(|| max_letter(|a| &a.v_word).max(1));
        let depth = addresses.iter().map(RtAddress::level).max().unwrap_or(0);
        Ok(RoundTreeGraph {
            graph,
            addresses,
            edge_kinds,
            h,
            v,
            depth,
        })
    }

    /// Checks the five round-tree axioms. Vertices at the deepest level are
    /// exempt from the branching axiom since the tree is truncated there.
    pub fn validate(&self) -> ValidationReport {
        let mut witness: [Option<String>; 5] = Default::default();
        let mut fail = |axiom: usize, msg: String| {
            if witness[axiom - 1].is_none() {
                witness[axiom - 1] = Some(msg);
            }
        };
        let index: HashMap<&RtAddress, usize> = self
            .addresses
            .iter()
            .enumerate()
            .map(|(i, a)| (a, i))
            .collect();
        if index.len() != self.addresses.len() {
            fail(1, "duplicate addresses".into());
        }

        // (1) equal word lengths.
        for (x, a) in self.addresses.iter().enumerate() {
            if a.h_word.len() != a.v_word.len() {
                fail(1, format!("vertex {x} ({})", a.label()));
            }
            if a.h_word.iter().any(|&c| c as usize >= self.h)
                || a.v_word.iter().any(|&c| c as usize >= self.v)
            {
                fail(
                    1,
                    format!(
                        "vertex {x} ({}) uses a letter outside the alphabet",
                        a.label()
                    ),
                );
            }
        }

        // (2) parent closure with vertical edge.
        for (x, a) in self.addresses.iter().enumerate() {
            if a.h_word.is_empty() && a.v_word.is_empty() {
                continue;
            }
            match a.parent().and_then(|p| index.get(&p).copied()) {
                None => fail(2, format!("vertex {x} ({}) has no parent", a.label())),
                Some(px) => {
                    if !self.graph.has_edge(x, px) {
                        fail(2, format!("missing vertical edge {px}-{x}"));
                    }
                }
            }
        }

        // (3) branching: children of (h,v) in direction beta are an initial segment.
        let mut children: HashMap<(usize, u8), Vec<u8>> = HashMap::new();
        for a in &self.addresses {
            if let Some(p) = a.parent() {
                if let Some(&px) = index.get(&p) {
                    children
                        .entry((px, *a.v_word.last().unwrap()))
                        .or_default()
                        .push(*a.h_word.last().unwrap());
                }
            }
        }
        for (x, a) in self.addresses.iter().enumerate() {
            if a.level() >= self.depth || a.h_word.len() != a.v_word.len() {
                continue;
            }
            for beta in 0..self.v as u8 {
                let mut letters = children.get(&(x, beta)).cloned().unwrap_or_default();
                letters.sort_unstable();
                let delta = letters.len();
                let initial = letters.iter().enumerate().all(|(i, &c)| c as usize == i);
                if !initial || delta < 2 || delta > self.h {
                    fail(
                        3,
                        format!(
                            "vertex {x} ({}), beta={beta}: letters {letters:?}",
                            a.label()
                        ),
                    );
                }
            }
        }

        // (4) horizontal adjacency of consecutive words; also collect the
        // consecutive pairs for (5).
        let mut by_v: BTreeMap<&[u8], Vec<(&[u8], usize)>> = BTreeMap::new();
        for (x, a) in self.addresses.iter().enumerate() {
            by_v.entry(&a.v_word).or_default().push((&a.h_word, x));
        }
        let mut consecutive = std::collections::HashSet::new();
        for row in by_v.values_mut() {
            row.sort_unstable();
            for w in row.windows(2) {
                let (x, y) = (w[0].1, w[1].1);
                consecutive.insert((x.min(y), x.max(y)));
                if !self.graph.has_edge(x, y) {
                    fail(
                        4,
                        format!(
                            "missing horizontal edge {x}-{y} ({} / {})",
                            self.addresses[x].label(),
                            self.addresses[y].label()
                        ),
                    );
                }
            }
        }

        // (5) classification of every edge.
        if self.edge_kinds.len() != self.graph.edge_count() {
            fail(5, "edge kind list does not match edge count".into());
        }
        for (e, &(x, y)) in self.graph.edges().iter().enumerate() {
            let (ax, ay) = (&self.addresses[x], &self.addresses[y]);
            let vertical = ax.parent().as_ref() == Some(ay) || ay.parent().as_ref() == Some(ax);
            let horizontal = consecutive.contains(&(x, y));
            let expected = if vertical {
                Some(EdgeKind::Vertical)
            } else if horizontal {
                Some(EdgeKind::Horizontal)
            } else {
                None
            };
            match expected {
                None => fail(
                    5,
                    format!("edge {x}-{y} ({} / {}) is neither", ax.label(), ay.label()),
                ),
                Some(k) if self.edge_kinds.get(e) != Some(&k) => {
                    fail(5, format!("edge {x}-{y} annotated as the wrong kind"))
                }
                _ => {}
            }
        }

        ValidationReport {
            checks: (0..5)
                .map(|i| AxiomCheck {
                    axiom: i as u8 + 1,
                    description: AXIOMS[i],
                    passed: witness[i].is_none(),
                    witness: witness[i].take(),
                })
                .collect(),
        }
    }
}
