use super::{Graph, VertexFunction};
use crate::error::{Error, Result};

/// Relative tolerance used for all norm comparisons.
pub const REL_TOL: f64 = 1e-12;

fn check_p(p: f64) -> Result<()> {
    if !p.is_finite() || p < 1.0 {
        return Err(Error::invalid(format!(
            "p must be finite and >= 1, got {p}"
        )));
    }
    Ok(())
}

/// Scaled evaluation avoids overflow for large `p`.
pub(crate) fn lp_norm_unchecked(v: impl Iterator<Item = f64> + Clone, p: f64) -> f64 {
    let scale = v.clone().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    if p == 1.0 {
        return v.map(f64::abs).sum();
    }
    let s: f64 = v.map(|x| (x.abs() / scale).powf(p)).sum();
    scale * s.powf(1.0 / p)
}

pub fn lp_norm(v: &[f64], p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(lp_norm_unchecked(v.iter().copied(), p))
}

/// ℓ^p norm of `|f(x) - f(y)|` over the edges of `g`.
pub fn gradient_norm(g: &Graph, f: &VertexFunction, p: f64) -> Result<f64> {
    check_p(p)?;
    if f.len() != g.n() {
        return Err(Error::invalid(
            "vertex function length does not match graph",
        ));
    }
    let vals = f.values();
    Ok(lp_norm_unchecked(
        g.edges().iter().map(|&(u, v)| vals[u] - vals[v]),
        p,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormCheck {
    pub holds: bool,
    /// `‖v‖_p - ‖v‖_q`, non-negative when the left inequality holds.
    pub left_slack: f64,
    /// `r^{1/p-1/q} ‖v‖_q - ‖v‖_p`, non-negative when the right inequality holds.
    pub right_slack: f64,
}

/// Checks `‖v‖_q ≤ ‖v‖_p ≤ r^{1/p-1/q} ‖v‖_q` with `r = v.len()`.
pub fn check_norm_inequalities(v: &[f64], p: f64, q: f64) -> Result<NormCheck> {
    check_p(p)?;
    check_p(q)?;
    if q < p {
        return Err(Error::invalid(format!("need q >= p, got p={p}, q={q}")));
    }
    let np = lp_norm_unchecked(v.iter().copied(), p);
    let nq = lp_norm_unchecked(v.iter().copied(), q);
    let r = v.len().max(1) as f64;
    let upper = r.powf(1.0 / p - 1.0 / q) * nq;
    let left_slack = np - nq;
    let right_slack = upper - np;
    let holds = nq <= np * (1.0 + REL_TOL) && np <= upper * (1.0 + REL_TOL);
    Ok(NormCheck {
        holds,
        left_slack,
        right_slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::families;
    use proptest::prelude::*;

    #[test]
    fn lp_examples() {
        assert_eq!(lp_norm(&[3.0, 4.0], 2.0).unwrap(), 5.0);
        let v = lp_norm(&[1.0; 4], 3.0).unwrap();
        assert!((v - 4f64.powf(1.0 / 3.0)).abs() < 1e-15);
        assert!(lp_norm(&[1.0], 0.5).is_err());
        assert!(lp_norm(&[1.0], f64::INFINITY).is_err());
        assert_eq!(lp_norm(&[], 2.0).unwrap(), 0.0);
    }

    #[test]
    fn gradient_examples() {
        let g = families::path(2);
        let f = VertexFunction::new(&g, vec![1.0, -1.0]).unwrap();
        assert_eq!(gradient_norm(&g, &f, 1.0).unwrap(), 2.0);
        let c = VertexFunction::new(&g, vec![3.0, 3.0]).unwrap();
        for p in [1.0, 1.5, 2.0, 7.0] {
            assert_eq!(gradient_norm(&g, &c, p).unwrap(), 0.0);
        }
    }

    #[test]
    fn norm_check_examples() {
        let c = check_norm_inequalities(&[1.0, 1.0], 1.0, 2.0).unwrap();
        assert!(c.holds);
        assert!(c.right_slack.abs() < 1e-15);
        let c = check_norm_inequalities(&[1.0, 0.0], 1.0, 2.0).unwrap();
        assert!(c.holds);
        assert_eq!(c.left_slack, 0.0);
        assert!(check_norm_inequalities(&[1.0], 2.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn norm_lemma_holds(
            v in prop::collection::vec(-1e3f64..1e3, 1..64),
            p in 1.0f64..6.0,
            dq in 0.0f64..6.0,
        ) {
            let c = check_norm_inequalities(&v, p, p + dq).unwrap();
            prop_assert!(c.holds, "{c:?}");
        }

        #[test]
        fn gradient_of_constant_is_zero(c in -10.0f64..10.0, p in 1.0f64..5.0) {
            let g = families::cycle(7);
            let f = VertexFunction::new(&g, vec![c; 7]).unwrap();
            prop_assert_eq!(gradient_norm(&g, &f, p).unwrap(), 0.0);
        }
    }
}
