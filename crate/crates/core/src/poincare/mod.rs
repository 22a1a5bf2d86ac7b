//! Poincaré constants `h^p(Γ) = inf ‖∇f‖_p / ‖f‖_p` over nonzero mean-zero
//! functions on the vertices of a finite connected graph.

mod minimize;
pub mod spectral;
mod two_valued;

pub use minimize::{hp_minimize, MinimizerSettings};
pub use two_valued::{h1_exhaustive, h1_sweep, two_valued_ratio, EXHAUSTIVE_LIMIT};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::norms::lp_norm_unchecked;
use crate::graph::{Graph, VertexFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Spectral,
    TwoValued,
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certified {
    UpperBound,
    Exact,
}

#[derive(Debug, Clone)]
pub struct PoincareResult {
    pub p: f64,
    pub value: f64,
    pub witness: VertexFunction,
    pub method: Method,
    pub certified: Certified,
    pub iterations: usize,
    pub seed: Option<u64>,
}

/// JSON record emitted for a Poincaré computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoincareRecord {
    pub p: f64,
    pub value: f64,
    pub method: Method,
    pub certified: Certified,
    pub iterations: usize,
    pub seed: Option<u64>,
}

impl PoincareResult {
    pub fn record(&self) -> PoincareRecord {
        PoincareRecord {
            p: self.p,
            value: self.value,
            method: self.method,
            certified: self.certified,
            iterations: self.iterations,
            seed: self.seed,
        }
    }

    /// Witness as `vertex,value` CSV lines with a header.
    pub fn witness_csv(&self) -> String {
        let mut s = String::from("vertex,value\n");
        for (i, v) in self.witness.values().iter().enumerate() {
            s.push_str(&format!("{i},{v}\n"));
        }
        s
    }
}

/// `‖∇f‖_p / ‖f‖_p`. Does not project `f`; callers pass mean-zero functions.
pub fn ratio(g: &Graph, f: &[f64], p: f64) -> f64 {
    let num = lp_norm_unchecked(g.edges().iter().map(|&(u, v)| f[u] - f[v]), p);
    let den = lp_norm_unchecked(f.iter().copied(), p);
    num / den
}

pub(crate) fn require_connected(g: &Graph) -> Result<()> {
    if g.n() < 2 {
        return Err(Error::invalid(
            "Poincaré constants need at least 2 vertices",
        ));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(())
}

/// `h^2(Γ) = √λ₂(L)`, with the Fiedler vector as witness.
pub fn h2_exact(g: &Graph) -> Result<PoincareResult> {
    require_connected(g)?;
    let pair = spectral::fiedler(g);
    let value = ratio(g, &pair.vector, 2.0);
    Ok(PoincareResult {
        p: 2.0,
        value,
        witness: VertexFunction::from_vec(pair.vector),
        method: Method::Spectral,
        certified: Certified::Exact,
        iterations: pair.iterations,
        seed: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families;

    #[test]
    fn h2_examples() {
        let r = h2_exact(&families::path(2)).unwrap();
        assert!((r.value - 2f64.sqrt()).abs() < 1e-12);
        let w = r.witness.values();
        assert!((w[0] + w[1]).abs() < 1e-12 && w[0] != 0.0);
        assert!((h2_exact(&families::complete(3)).unwrap().value - 3f64.sqrt()).abs() < 1e-12);
        assert!((h2_exact(&families::path(3)).unwrap().value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_disconnected_and_tiny() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert!(matches!(h2_exact(&g), Err(Error::Disconnected)));
        assert!(h2_exact(&families::path(1)).is_err());
    }

    #[test]
    fn witness_invariants() {
        let g = families::cycle(9);
        let r = h2_exact(&g).unwrap();
        assert!(r.witness.mean().abs() < 1e-12);
        let direct = ratio(&g, r.witness.values(), 2.0);
        assert!((direct - r.value).abs() <= 1e-9 * r.value);
        assert_eq!(r.record().method, Method::Spectral);
        assert!(r.witness_csv().starts_with("vertex,value\n0,"));
    }

    #[test]
    fn ratio_is_scale_invariant() {
        let g = families::path(5);
        let f = [2.0, 1.0, 0.0, -1.0, -2.0];
        for p in [1.0, 1.5, 2.0, 3.0] {
            let base = ratio(&g, &f, p);
            for c in [-3.0, 0.25, 7.5] {
                let scaled: Vec<f64> = f.iter().map(|x| c * x).collect();
                assert!((ratio(&g, &scaled, p) - base).abs() <= 1e-12 * base);
            }
        }
    }
}
