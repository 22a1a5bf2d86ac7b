use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::{components, Graph};
use crate::poincare::spectral::fiedler;

/// Largest graph accepted by the exact solvers.
pub const EXACT_CUT_LIMIT: usize = 20;

/// Rational component-size fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Epsilon {
    pub num: u64,
    pub den: u64,
}

impl Epsilon {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 || num == 0 || num > den {
            return Err(Error::invalid(format!(
                "epsilon must lie in (0, 1], got {num}/{den}"
            )));
        }
        Ok(Self { num, den })
    }

    /// Whether a component of `size` vertices is allowed in a graph of `r`.
    pub fn admits(self, size: usize, r: usize) -> bool {
        size as u128 * self.den as u128 <= self.num as u128 * r as u128
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl Default for Epsilon {
    fn default() -> Self {
        Self { num: 2, den: 3 }
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Epsilon {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("epsilon must look like a/b, got {s:?}"));
        let (a, b) = s.split_once('/').ok_or_else(bad)?;
        Self::new(
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        )
    }
}

impl Serialize for Epsilon {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Epsilon {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutMethod {
    Exact,
    Heuristic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutResult {
    pub epsilon: Epsilon,
    pub cut_set: Vec<usize>,
    pub size: usize,
    /// Largest remaining component over `r`.
    pub max_component_fraction: f64,
    pub method: CutMethod,
    pub optimal: bool,
}

impl CutResult {
    fn new(
        g: &Graph,
        epsilon: Epsilon,
        mut cut_set: Vec<usize>,
        method: CutMethod,
    ) -> Result<Self> {
        cut_set.sort_unstable();
        let largest = g
            .components_after_removal(&cut_set)?
            .first()
            .copied()
            .unwrap_or(0);
        Ok(Self {
            epsilon,
            size: cut_set.len(),
            cut_set,
            max_component_fraction: if g.n() == 0 {
                0.0
            } else {
                largest as f64 / g.n() as f64
            },
            method,
            optimal: method == CutMethod::Exact,
        })
    }

    /// Re-checks the component condition on `g`.
    pub fn verify(&self, g: &Graph) -> Result<bool> {
        let sizes = g.components_after_removal(&self.cut_set)?;
        Ok(sizes.iter().all(|&s| self.epsilon.admits(s, g.n())))
    }
}

struct Masks {
    n: usize,
    nbr: Vec<u32>,
    eps: Epsilon,
}

impl Masks {
    fn new(g: &Graph, eps: Epsilon) -> Result<Self> {
        if g.n() > EXACT_CUT_LIMIT {
            return Err(Error::invalid(format!(
                "exact cut limited to {EXACT_CUT_LIMIT} vertices, got {}",
                g.n()
            )));
        }
        let nbr = (0..g.n())
            .map(|x| g.neighbors(x).iter().fold(0u32, |m, &y| m | 1 << y))
            .collect();
        Ok(Self { n: g.n(), nbr, eps })
    }

    fn full(&self) -> u32 {
        if self.n == 32 {
            u32::MAX
        } else {
            (1u32 << self.n) - 1
        }
    }

    fn component(&self, alive: u32, start: usize) -> u32 {
        let mut comp = 1u32 << start;
        let mut frontier = comp;
        while frontier != 0 {
            let x = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let fresh = self.nbr[x] & alive & !comp;
            comp |= fresh;
            frontier |= fresh;
        }
        comp
    }

    /// Oversized components of the graph minus `removed`.
    fn oversized(&self, removed: u32) -> Vec<u32> {
        let mut rest = self.full() & !removed;
        let alive = rest;
        let mut out = Vec::new();
        while rest != 0 {
            let comp = self.component(alive, rest.trailing_zeros() as usize);
            rest &= !comp;
            if !self.eps.admits(comp.count_ones() as usize, self.n) {
                out.push(comp);
            }
        }
        out
    }

    fn feasible(&self, removed: u32) -> bool {
        self.oversized(removed).is_empty()
    }
}

fn mask_to_set(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).collect()
}

/// Minimum ε-cut by branch and bound: some vertex of every oversized
/// component must be removed, so branching over one such component with
/// exclusion of earlier choices enumerates each candidate set once.
pub fn cut_exact(g: &Graph, epsilon: Epsilon) -> Result<CutResult> {
    let masks = Masks::new(g, epsilon)?;
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by_key(|&x| (std::cmp::Reverse(g.degree(x)), x));

    fn search(
        m: &Masks,
        order: &[usize],
        removed: u32,
        excluded: u32,
        remaining: usize,
    ) -> Option<u32> {
        let over = m.oversized(removed);
        let Some(&target) = over
            .iter()
            .max_by_key(|c| (c.count_ones(), std::cmp::Reverse(c.trailing_zeros())))
        else {
            return Some(removed);
        };
        if over.len() > remaining {
            return None;
        }
        let mut excluded = excluded;
        for &x in order {
            let bit = 1u32 << x;
            if target & bit == 0 || excluded & bit != 0 {
                continue;
            }
            if let Some(found) = search(m, order, removed | bit, excluded, remaining - 1) {
                return Some(found);
            }
            excluded |= bit;
        }
        None
    }

    for budget in 0..=g.n() {
        if let Some(mask) = search(&masks, &order, 0, 0, budget) {
            return CutResult::new(g, epsilon, mask_to_set(mask), CutMethod::Exact);
        }
    }
    unreachable!("removing every vertex is always feasible")
}

/// Minimum ε-cut by scanning every vertex subset.
pub fn cut_exhaustive(g: &Graph, epsilon: Epsilon) -> Result<CutResult> {
    let masks = Masks::new(g, epsilon)?;
    let mut best = masks.full();
    for mask in 0..=masks.full() {
        if mask.count_ones() < best.count_ones() && masks.feasible(mask) {
            best = mask;
        }
    }
    CutResult::new(g, epsilon, mask_to_set(best), CutMethod::Exact)
}

/// Smallest balanced vertex separator of the component `comp` along its
/// Fiedler order.
fn sweep_separator(g: &Graph, comp: &[usize]) -> Result<Vec<usize>> {
    let len = comp.len();
    if len <= 2 {
        return Ok(vec![*comp.iter().min().expect("nonempty component")]);
    }
    let sub = g.induced_subgraph(comp)?;
    let pair = fiedler(&sub.graph);
    let mut order: Vec<usize> = (0..len).collect();
    order.sort_by(|&a, &b| pair.vector[a].total_cmp(&pair.vector[b]).then(a.cmp(&b)));
    let mut rank = vec![0; len];
    for (r, &x) in order.iter().enumerate() {
        rank[x] = r;
    }
    // For a split into ranks [0, i) and [i, len):
    // boundary_a(i) counts x with rank(x) < i <= max neighbour rank,
    // boundary_b(i) counts x with min neighbour rank < i <= rank(x).
    let mut da = vec![0i64; len + 2];
    let mut db = vec![0i64; len + 2];
    for x in 0..len {
        let rs = sub.graph.neighbors(x).iter().map(|&y| rank[y]);
        let (lo, hi) = rs.fold((usize::MAX, 0), |(lo, hi), r| (lo.min(r), hi.max(r)));
        if hi > rank[x] {
            da[rank[x] + 1] += 1;
            da[hi + 1] -= 1;
        }
        if lo < rank[x] {
            db[lo + 1] += 1;
            db[rank[x] + 1] -= 1;
        }
    }
    let lo = len.div_ceil(3).max(1);
    let hi = (2 * len / 3).clamp(lo, len - 1);
    let (mut a, mut b) = (0i64, 0i64);
    let mut best: Option<(i64, usize, usize, bool)> = None;
    for i in 1..len {
        a += da[i];
        b += db[i];
        if i < lo || i > hi {
            continue;
        }
        let (size, use_a) = if a <= b { (a, true) } else { (b, false) };
        let key = (size, (2 * i).abs_diff(len), i, use_a);
        if best.is_none_or(|bk| (key.0, key.1, key.2) < (bk.0, bk.1, bk.2)) {
            best = Some(key);
        }
    }
    let (_, _, split, use_a) = best.expect("nonempty sweep range");
    let mut sep = Vec::new();
    for x in 0..len {
        let ranks = sub.graph.neighbors(x).iter().map(|&y| rank[y]);
        let on_a = rank[x] < split;
        let crosses = ranks.clone().any(|r| (r < split) != on_a);
        if crosses && on_a == use_a {
            sep.push(sub.original[x]);
        }
    }
    Ok(sep)
}

/// Upper bound on the ε-cut size: Fiedler sweeps applied recursively to
/// oversized components, followed by greedy shrinking.
pub fn cut_heuristic(g: &Graph, epsilon: Epsilon) -> Result<CutResult> {
    let n = g.n();
    let mut removed = vec![false; n];
    let oversized = |removed: &[bool]| -> Vec<Vec<usize>> {
        components(g, removed)
            .into_iter()
            .filter(|c| !epsilon.admits(c.len(), n))
            .collect()
    };
    loop {
        let over = oversized(&removed);
        if over.is_empty() {
            break;
        }
        for comp in over {
            for x in sweep_separator(g, &comp)? {
                removed[x] = true;
            }
        }
    }
    for x in 0..n {
        if removed[x] {
            removed[x] = false;
            if !oversized(&removed).is_empty() {
                removed[x] = true;
            }
        }
    }
    let cut: Vec<usize> = (0..n).filter(|&x| removed[x]).collect();
    CutResult::new(g, epsilon, cut, CutMethod::Heuristic)
}

/// A witness sample of the separation profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SepPoint {
    pub graph_id: String,
    pub r: usize,
    pub size: usize,
    pub method: CutMethod,
    pub optimal: bool,
}

/// Exact below [`EXACT_CUT_LIMIT`] vertices, heuristic above.
pub fn sep_point(g: &Graph, epsilon: Epsilon, graph_id: &str) -> Result<SepPoint> {
    let cut = if g.n() <= EXACT_CUT_LIMIT {
        cut_exact(g, epsilon)?
    } else {
        cut_heuristic(g, epsilon)?
    };
    Ok(SepPoint {
        graph_id: graph_id.to_string(),
        r: g.n(),
        size: cut.size,
        method: cut.method,
        optimal: cut.optimal,
    })
}
