//! Canonical path systems, per-edge congestion loads, and the path-counting
//! lower bound on Poincaré constants.
//!
//! For walks `γ_{w0,w1}` between every ordered pair and loads `M_e` (the
//! number of pairs whose walk contains `e`; a pair counts once even if its
//! walk crosses `e` repeatedly):
//!
//! * `p = 1`: `h^1 ≥ n / max_e M_e`
//! * `p > 1`: `h^p ≥ n^{1/p} / max_{w0,w1} (Σ_{e∈γ} M_e^{1/(p-1)})^{(p-1)/p}`
//!
//! Loads always come from enumerating every ordered pair, so the bound holds
//! unconditionally for the path system used.

mod bfs;
mod explicit;
mod yk_routing;

pub use bfs::BfsPaths;
pub use explicit::ExplicitPaths;
pub use yk_routing::{BalanceStats, Coloring, LoadDiagnostics, YkRouter};

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Budget;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// A choice of walk between every ordered pair of vertices.
pub trait PathSystem: Sync {
    fn graph(&self) -> &Graph;

    /// Walk from `w0` to `w1` as a sequence of edge indices. Empty iff `w0 == w1`.
    fn path(&self, w0: usize, w1: usize) -> Result<Vec<usize>>;

    /// Distinct edges of the walk from `w0` to `w1`, ascending.
    fn edge_set(&self, w0: usize, w1: usize) -> Result<Vec<usize>> {
        let mut edges = self.path(w0, w1)?;
        edges.sort_unstable();
        edges.dedup();
        Ok(edges)
    }

    /// Routing work needed by [`PathSystem::loads`], in budget units.
    fn work_estimate(&self) -> u128 {
        let n = self.graph().n() as u128;
        n * n * n.max(1)
    }

    /// Exact loads over all ordered pairs.
    fn loads(&self, budget: &Budget) -> Result<Loads> {
        budget.check_work(self.work_estimate())?;
        naive_loads(self)
    }

    /// Maximum over ordered pairs of `Σ_{e∈γ} weights[e]` over the distinct
    /// edges of `γ`, with the maximizing pair.
    fn max_path_sum(&self, weights: &[f64]) -> Result<(f64, (usize, usize))> {
        naive_max_path_sum(self, weights)
    }
}

/// Per-edge loads `M_e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Loads {
    pub m_e: Vec<u64>,
    /// `Σ_pairs |γ|`, counting distinct edges of each walk.
    pub total_path_length: u128,
}

impl Loads {
    pub fn max(&self) -> (u64, usize) {
        let mut best = (0, 0);
        for (e, &m) in self.m_e.iter().enumerate() {
            if m > best.0 {
                best = (m, e);
            }
        }
        best
    }

    pub fn sum(&self) -> u128 {
        self.m_e.iter().map(|&m| m as u128).sum()
    }

    /// `u,v,M_e` rows with a header.
    pub fn to_csv(&self, g: &Graph) -> String {
        let mut s = String::from("u,v,m_e\n");
        for (e, &m) in self.m_e.iter().enumerate() {
            let (u, v) = g.edge(e);
            s.push_str(&format!("{u},{v},{m}\n"));
        }
        s
    }
}

/// Checks that `edges` is a walk from `w0` to `w1`.
pub fn is_walk(g: &Graph, w0: usize, w1: usize, edges: &[usize]) -> bool {
    let mut at = w0;
    for &e in edges {
        if e >= g.edge_count() {
            return false;
        }
        let (u, v) = g.edge(e);
        at = if u == at {
            v
        } else if v == at {
            u
        } else {
            return false;
        };
    }
    at == w1
}

/// Streams every ordered pair through [`PathSystem::edge_set`], incrementing loads.
pub fn naive_loads<P: PathSystem + ?Sized>(ps: &P) -> Result<Loads> {
    let g = ps.graph();
    let n = g.n();
    let (m_e, total) = (0..n)
        .into_par_iter()
        .try_fold(
            || (vec![0u64; g.edge_count()], 0u128),
            |(mut acc, mut total), w0| {
                for w1 in 0..n {
                    let path = ps.edge_set(w0, w1)?;
                    total += path.len() as u128;
                    for e in path {
                        acc[e] += 1;
                    }
                }
                Ok::<_, Error>((acc, total))
            },
        )
        .try_reduce(
            || (vec![0u64; g.edge_count()], 0u128),
            |(mut a, ta), (b, tb)| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                Ok((a, ta + tb))
            },
        )?;
    Ok(Loads {
        m_e,
        total_path_length: total,
    })
}

fn better(a: (f64, (usize, usize)), b: (f64, (usize, usize))) -> (f64, (usize, usize)) {
    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

pub(crate) fn reduce_max(
    it: impl ParallelIterator<Item = (f64, (usize, usize))>,
) -> (f64, (usize, usize)) {
    it.reduce(|| (f64::NEG_INFINITY, (usize::MAX, usize::MAX)), better)
}

pub fn naive_max_path_sum<P: PathSystem + ?Sized>(
    ps: &P,
    weights: &[f64],
) -> Result<(f64, (usize, usize))> {
    let n = ps.graph().n();
    let per_w0: Vec<(f64, (usize, usize))> = (0..n)
        .into_par_iter()
        .map(|w0| {
            let mut best = (f64::NEG_INFINITY, (usize::MAX, usize::MAX));
            for w1 in 0..n {
                let s: f64 = ps.edge_set(w0, w1)?.iter().map(|&e| weights[e]).sum();
                best = better(best, (s, (w0, w1)));
            }
            Ok(best)
        })
        .collect::<Result<_>>()?;
    Ok(reduce_max(per_w0.into_par_iter()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormulaTrace {
    pub n: usize,
    pub p: f64,
    /// `1/(p-1)` for `p > 1`; absent at `p = 1`.
    pub load_exponent: Option<f64>,
    pub max_edge_load: u64,
    /// Maximizing `Σ M_e^{1/(p-1)}` (or `max M_e` at `p = 1`).
    pub max_path_sum: f64,
    pub numerator: f64,
    pub denominator: f64,
}

#[derive(Debug, Clone)]
pub struct CongestionCertificate {
    pub p: f64,
    pub n: usize,
    pub m_e: Vec<u64>,
    pub bound: f64,
    pub max_path_sum: f64,
    /// Maximizing pair for `p > 1`; endpoints of the maximizing edge at `p = 1`.
    pub argmax_pair: (usize, usize),
    pub certified: bool,
    pub elapsed: f64,
    pub formula_trace: FormulaTrace,
}

/// Certificate JSON record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub p: f64,
    pub n: usize,
    pub bound: f64,
    pub max_edge_load: u64,
    pub argmax_pair: [usize; 2],
    pub elapsed: f64,
    pub certified: bool,
}

impl CongestionCertificate {
    pub fn to_json(&self) -> CertificateJson {
        CertificateJson {
            p: self.p,
            n: self.n,
            bound: self.bound,
            max_edge_load: self.formula_trace.max_edge_load,
            argmax_pair: [self.argmax_pair.0, self.argmax_pair.1],
            elapsed: self.elapsed,
            certified: self.certified,
        }
    }

    /// Recomputes the bound from the stored loads and trace.
    pub fn recompute(&self) -> f64 {
        let n = self.n as f64;
        if self.p == 1.0 {
            n / *self.m_e.iter().max().unwrap_or(&0) as f64
        } else {
            n.powf(1.0 / self.p) / self.max_path_sum.powf((self.p - 1.0) / self.p)
        }
    }
}

fn check_p(p: f64) -> Result<()> {
    if !p.is_finite() || p < 1.0 {
        return Err(Error::invalid(format!(
            "p must be finite and >= 1, got {p}"
        )));
    }
    Ok(())
}

/// Evaluates the path-counting bound from loads computed on `ps`.
pub fn lemma_bound<P: PathSystem + ?Sized>(
    ps: &P,
    loads: &Loads,
    p: f64,
) -> Result<CongestionCertificate> {
    check_p(p)?;
    let start = Instant::now();
    let g = ps.graph();
    let n = g.n();
    if loads.m_e.len() != g.edge_count() {
        return Err(Error::invalid("loads do not match the graph's edges"));
    }
    let (max_load, max_edge) = loads.max();
    if n < 2 || max_load == 0 {
        return Err(Error::Degenerate("empty path system".into()));
    }
    let (bound, max_path_sum, argmax_pair, load_exponent, numerator, denominator) = if p == 1.0 {
        let num = n as f64;
        let den = max_load as f64;
        (num / den, den, g.edge(max_edge), None, num, den)
    } else {
        let exponent = 1.0 / (p - 1.0);
        let weights: Vec<f64> = loads
            .m_e
            .iter()
            .map(|&m| (m as f64).powf(exponent))
            .collect();
        let (sum, pair) = ps.max_path_sum(&weights)?;
        let num = (n as f64).powf(1.0 / p);
        let den = sum.powf((p - 1.0) / p);
        (num / den, sum, pair, Some(exponent), num, den)
    };
    Ok(CongestionCertificate {
        p,
        n,
        m_e: loads.m_e.clone(),
        bound,
        max_path_sum,
        argmax_pair,
        certified: true,
        elapsed: start.elapsed().as_secs_f64(),
        formula_trace: FormulaTrace {
            n,
            p,
            load_exponent,
            max_edge_load: max_load,
            max_path_sum,
            numerator,
            denominator,
        },
    })
}

/// Computes loads and the bound in one call.
pub fn certify<P: PathSystem + ?Sized>(
    ps: &P,
    p: f64,
    budget: &Budget,
) -> Result<CongestionCertificate> {
    check_p(p)?;
    let start = Instant::now();
    let loads = ps.loads(budget)?;
    let mut cert = lemma_bound(ps, &loads, p)?;
    cert.elapsed = start.elapsed().as_secs_f64();
    Ok(cert)
}

/// Estimates loads from `samples` uniform ordered pairs, scaled to `n²`
/// pairs. The resulting bound is not a certificate.
pub fn sampled_bound<P: PathSystem + ?Sized>(
    ps: &P,
    p: f64,
    samples: usize,
    seed: u64,
) -> Result<CongestionCertificate> {
    check_p(p)?;
    let start = Instant::now();
    let g = ps.graph();
    let n = g.n();
    if n < 2 || samples == 0 {
        return Err(Error::Degenerate("empty path system".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; g.edge_count()];
    let mut pairs = Vec::with_capacity(samples);
    for _ in 0..samples {
        let (w0, w1) = (rng.gen_range(0..n), rng.gen_range(0..n));
        for e in ps.edge_set(w0, w1)? {
            counts[e] += 1;
        }
        pairs.push((w0, w1));
    }
    let scale = (n as f64).powi(2) / samples as f64;
    let estimate: Vec<f64> = counts.iter().map(|&c| c as f64 * scale).collect();
    let (max_edge, max_load) = estimate
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0f64), |b, (e, m)| if m > b.1 { (e, m) } else { b });
    if max_load == 0.0 {
        return Err(Error::Degenerate("no sampled path used an edge".into()));
    }
    let (bound, sum, pair, exponent) = if p == 1.0 {
        (n as f64 / max_load, max_load, g.edge(max_edge), None)
    } else {
        let exponent = 1.0 / (p - 1.0);
        let mut best = (f64::NEG_INFINITY, (0, 0));
        for &(w0, w1) in &pairs {
            let s: f64 = ps
                .edge_set(w0, w1)?
                .iter()
                .map(|&e| estimate[e].powf(exponent))
                .sum();
            best = better(best, (s, (w0, w1)));
        }
        (
            (n as f64).powf(1.0 / p) / best.0.powf((p - 1.0) / p),
            best.0,
            best.1,
            Some(exponent),
        )
    };
    Ok(CongestionCertificate {
        p,
        n,
        m_e: estimate.iter().map(|&m| m.round() as u64).collect(),
        bound,
        max_path_sum: sum,
        argmax_pair: pair,
        certified: false,
        elapsed: start.elapsed().as_secs_f64(),
        formula_trace: FormulaTrace {
            n,
            p,
            load_exponent: exponent,
            max_edge_load: max_load.round() as u64,
            max_path_sum: sum,
            numerator: if p == 1.0 {
                n as f64
            } else {
                (n as f64).powf(1.0 / p)
            },
            denominator: if p == 1.0 {
                max_load
            } else {
                sum.powf((p - 1.0) / p)
            },
        },
    })
}
