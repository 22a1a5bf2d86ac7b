//! Finite-depth Cantor spaces `[V]^n` with the ultrametric
//! `ρ(a, b) = H^{-i*}` (first mismatch `i*`, 1-based), uniform measure, and
//! a discrete cone over `Z × [0, 1]`.
//!
//! Balls are open: `B(a, r) = {b : ρ(a, b) < r}`, so `B(a, H^{-k})` is the
//! set of words sharing the first `k` letters of `a`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::config::Budget;
use crate::error::{Error, Result};
use crate::graph::{Graph, GraphJson};
use crate::round_tree::{code_to_word, word_to_string};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CantorSpace {
    pub h: usize,
    pub v: usize,
    pub depth: usize,
}

/// `H^{-i*}` for the first mismatch `i*`, or 0 for equal words.
pub fn rho(a: &[u8], b: &[u8], h: usize) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!(
            "word lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(match first_mismatch(a, b) {
        None => 0.0,
        Some(i) => (h as f64).powi(-(i as i32)),
    })
}

fn first_mismatch(a: &[u8], b: &[u8]) -> Option<usize> {
    a.iter().zip(b).position(|(x, y)| x != y).map(|i| i + 1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AhlforsReport {
    pub q_z: f64,
    /// Smallest `C` with `μ(B)/r^Q ∈ [1/C, C]` on every scanned ball.
    pub c: f64,
    pub worst_center: String,
    pub worst_radius: f64,
    pub centers: usize,
    pub radii: usize,
}

impl CantorSpace {
    pub fn new(h: usize, v: usize, depth: usize) -> Result<Self> {
        if h < 2 || !(2..=36).contains(&v) {
            return Err(Error::invalid(format!(
                "need H >= 2 and 2 <= V <= 36, got H = {h}, V = {v}"
            )));
        }
        if (v as f64).powi(depth as i32) > 1e8 {
            return Err(Error::invalid(format!(
                "V^depth too large to enumerate: {v}^{depth}"
            )));
        }
        Ok(Self { h, v, depth })
    }

    /// `ln V / ln H`.
    pub fn q_z(&self) -> f64 {
        (self.v as f64).ln() / (self.h as f64).ln()
    }

    pub fn point_count(&self) -> usize {
        self.v.pow(self.depth as u32)
    }

    pub fn point(&self, index: usize) -> Vec<u8> {
        code_to_word(index as u64, self.v, self.depth)
    }

    fn check_word(&self, w: &[u8]) -> Result<()> {
        if w.len() != self.depth || w.iter().any(|&c| c as usize >= self.v) {
            return Err(Error::invalid(format!(
                "word {} is not in [{}]^{}",
                word_to_string(w),
                self.v,
                self.depth
            )));
        }
        Ok(())
    }

    pub fn rho(&self, a: &[u8], b: &[u8]) -> Result<f64> {
        self.check_word(a)?;
        self.check_word(b)?;
        rho(a, b, self.h)
    }

    /// Measure of `B(center, H^{-k})`, which is `V^{-k}`.
    pub fn ball_measure(&self, center: &[u8], k: usize) -> Result<f64> {
        self.check_word(center)?;
        if k > self.depth {
            return Err(Error::invalid(format!(
                "k = {k} exceeds depth {}",
                self.depth
            )));
        }
        Ok((self.v as f64).powi(-(k as i32)))
    }

    /// Measure of `B(center, radius)` by enumerating every point.
    pub fn ball_measure_enumerated(&self, center: &[u8], radius: f64) -> Result<f64> {
        self.check_word(center)?;
        let inside = (0..self.point_count())
            .filter(|&i| {
                rho(center, &self.point(i), self.h)
                    .map(|d| d < radius)
                    .unwrap_or(false)
            })
            .count();
        Ok(inside as f64 / self.point_count() as f64)
    }

    /// Scans every center against the radii `H^{-k}` and their geometric
    /// midpoints, by enumeration.
    pub fn ahlfors_report(&self) -> Result<AhlforsReport> {
        if self.depth < 1 {
            return Err(Error::invalid("depth must be >= 1"));
        }
        let q = self.q_z();
        let hf = self.h as f64;
        let mut radii: Vec<f64> = (0..=self.depth).map(|k| hf.powi(-(k as i32))).collect();
        radii.extend((0..self.depth).map(|k| hf.powf(-(k as f64) - 0.5)));
        let n = self.point_count();
        let points: Vec<Vec<u8>> = (0..n).map(|i| self.point(i)).collect();
        let mut best = (1.0f64, 0usize, 1.0f64);
        for (ci, a) in points.iter().enumerate() {
            // hist[i] = number of points first differing at letter i; hist[0] = a itself.
            let mut hist = vec![0usize; self.depth + 1];
            for b in &points {
                hist[first_mismatch(a, b).unwrap_or(0)] += 1;
            }
            for &r in &radii {
                let inside: usize = hist
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i == 0 || hf.powi(-(i as i32)) < r)
                    .map(|(_, c)| c)
                    .sum();
                let ratio = inside as f64 / n as f64 / r.powf(q);
                let c = ratio.max(1.0 / ratio);
                if c > best.0 * (1.0 + 1e-12) {
                    best = (c, ci, r);
                }
            }
        }
        Ok(AhlforsReport {
            q_z: q,
            c: best.0,
            worst_center: word_to_string(&points[best.1]),
            worst_radius: best.2,
            centers: n,
            radii: radii.len(),
        })
    }
}

/// Discrete cone: vertex `(w, j)` at level `k` stands for the region
/// `B(w…, H^{-k}) × [j H^{-k}, (j+1) H^{-k}]`.
#[derive(Debug, Clone)]
pub struct ConeGraph {
    pub graph: Graph,
    pub h: usize,
    pub v: usize,
    pub depth: usize,
    level_offset: Vec<usize>,
}

impl ConeGraph {
    pub fn vertex(&self, level: usize, w_code: usize, j: usize) -> usize {
        self.level_offset[level] + w_code * self.h.pow(level as u32) + j
    }

    /// `(level, w_code, j)` of a vertex.
    pub fn region(&self, x: usize) -> (usize, usize, usize) {
        let level = self.level_offset.partition_point(|&o| o <= x) - 1;
        let local = x - self.level_offset[level];
        let width = self.h.pow(level as u32);
        (level, local / width, local % width)
    }

    pub fn label(&self, x: usize) -> String {
        let (level, w, j) = self.region(x);
        format!(
            "k={level};w={};j={j}",
            word_to_string(&code_to_word(w as u64, self.v, level))
        )
    }

    pub fn to_json(&self) -> GraphJson {
        let labels: BTreeMap<usize, String> =
            (0..self.graph.n()).map(|x| (x, self.label(x))).collect();
        GraphJson::from_graph(&self.graph).with_labels(labels)
    }
}

/// Projected vertex count `Σ_{k≤depth} (HV)^k`.
pub fn cone_size(h: usize, v: usize, depth: usize) -> Option<u128> {
    (0..=depth).try_fold(0u128, |acc, k| {
        acc.checked_add(((h * v) as u128).checked_pow(k as u32)?)
    })
}

/// Regions at the same level or adjacent levels are joined when their
/// closed regions overlap.
pub fn build_cone_graph(space: &CantorSpace, depth: usize, budget: &Budget) -> Result<ConeGraph> {
    if depth > space.depth {
        return Err(Error::invalid(format!(
            "cone depth {depth} exceeds space depth {}",
            space.depth
        )));
    }
    let (h, v) = (space.h, space.v);
    budget.check_vertices(cone_size(h, v, depth).unwrap_or(u128::MAX))?;
    let mut level_offset = Vec::with_capacity(depth + 1);
    let mut total = 0usize;
    for k in 0..=depth {
        level_offset.push(total);
        total += (h * v).pow(k as u32);
    }
    let cone = ConeGraph {
        graph: Graph::from_canonical(0, Vec::new()),
        h,
        v,
        depth,
        level_offset,
    };
    let mut edges = Vec::new();
    for k in 0..=depth {
        let width = h.pow(k as u32);
        for w in 0..v.pow(k as u32) {
            for j in 0..width {
                let x = cone.vertex(k, w, j);
                if j + 1 < width {
                    edges.push((x, x + 1));
                }
                if k < depth {
                    let lo = (j * h).saturating_sub(1);
                    let hi = ((j + 1) * h).min(width * h - 1);
                    for beta in 0..v {
                        for jj in lo..=hi {
                            edges.push((x, cone.vertex(k + 1, w * v + beta, jj)));
                        }
                    }
                }
            }
        }
    }
    edges.sort_unstable();
    Ok(ConeGraph {
        graph: Graph::from_canonical(total, edges),
        ..cone
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rho_examples() {
        assert_eq!(rho(&[0, 1, 0], &[0, 1, 0], 2).unwrap(), 0.0);
        assert_eq!(rho(&[1, 1], &[0, 1], 3).unwrap(), 1.0 / 3.0);
        assert_eq!(rho(&[0, 1, 0], &[0, 1, 1], 2).unwrap(), 0.125);
        assert!(rho(&[0], &[0, 1], 2).is_err());
        let s = CantorSpace::new(2, 2, 3).unwrap();
        assert!(s.rho(&[0, 2, 0], &[0, 0, 0]).is_err());
    }

    #[test]
    fn ultrametric_on_random_triples() {
        let s = CantorSpace::new(3, 3, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100_000 {
            let [a, b, c] = [(); 3].map(|_| s.point(rng.gen_range(0..s.point_count())));
            let ac = s.rho(&a, &c).unwrap();
            assert!(ac <= s.rho(&a, &b).unwrap().max(s.rho(&b, &c).unwrap()));
        }
    }

    #[test]
    fn ball_measure_examples() {
        let s = CantorSpace::new(3, 2, 4).unwrap();
        let a = s.point(5);
        assert_eq!(s.ball_measure(&a, 0).unwrap(), 1.0);
        assert_eq!(s.ball_measure(&a, 2).unwrap(), 0.25);
        assert!(s.ball_measure(&a, 5).is_err());
        let s = CantorSpace::new(2, 2, 6).unwrap();
        let a = s.point(17);
        assert_eq!(s.ball_measure_enumerated(&a, 0.125).unwrap(), 0.125);
    }

    #[test]
    fn formula_matches_enumeration() {
        for (h, v, n) in [(2, 2, 10), (3, 2, 8), (2, 3, 6), (4, 3, 5)] {
            let s = CantorSpace::new(h, v, n).unwrap();
            for idx in [0, s.point_count() / 3, s.point_count() - 1] {
                let a = s.point(idx);
                for k in 0..=n {
                    let r = (h as f64).powi(-(k as i32));
                    assert_eq!(
                        s.ball_measure(&a, k).unwrap(),
                        s.ball_measure_enumerated(&a, r).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn ahlfors_constant() {
        let r = CantorSpace::new(3, 2, 8).unwrap().ahlfors_report().unwrap();
        assert!((r.q_z - 2f64.ln() / 3f64.ln()).abs() < 1e-15);
        assert!(r.c <= 2.0);
        assert!((r.c - 2f64.sqrt()).abs() < 1e-9);
        let r = CantorSpace::new(2, 2, 1).unwrap().ahlfors_report().unwrap();
        assert!(r.c >= 1.0);
    }

    #[test]
    fn cone_sizes_and_shape() {
        let s = CantorSpace::new(2, 2, 6).unwrap();
        let b = Budget::default();
        assert_eq!(build_cone_graph(&s, 0, &b).unwrap().graph.n(), 1);
        let c1 = build_cone_graph(&s, 1, &b).unwrap();
        assert_eq!(c1.graph.n(), 5);
        let c = build_cone_graph(&s, 5, &b).unwrap();
        assert_eq!(c.graph.n() as u128, cone_size(2, 2, 5).unwrap());
        assert!(c.graph.is_connected());
        assert!(c.graph.max_degree() <= 2 + 2 * 2 * (2 + 2) + 2);
        for x in 0..c.graph.n() {
            let (k, w, j) = c.region(x);
            assert_eq!(c.vertex(k, w, j), x);
        }
        assert_eq!(c1.label(3), "k=1;w=1;j=0");
        assert!(build_cone_graph(&s, 7, &b).is_err());
        assert!(build_cone_graph(
            &s,
            5,
            &Budget {
                vertices: 10,
                work: 1
            }
        )
        .unwrap_err()
        .is_budget());
    }

    #[test]
    fn cone_degree_is_bounded_in_depth() {
        let s = CantorSpace::new(3, 2, 6).unwrap();
        let b = Budget::default();
        let d4 = build_cone_graph(&s, 4, &b).unwrap().graph.max_degree();
        let d6 = build_cone_graph(&s, 6, &b).unwrap().graph.max_degree();
        assert_eq!(d4, d6);
    }
}
