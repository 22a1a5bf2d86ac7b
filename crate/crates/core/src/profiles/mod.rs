//! Profile samples, growth-exponent fits and ε-cut sizes.

mod cut;
mod fit;

pub use cut::{
    cut_exact, cut_exhaustive, cut_heuristic, sep_point, CutMethod, CutResult, Epsilon, SepPoint,
    EXACT_CUT_LIMIT,
};
pub use fit::{fit_exponent, fit_log, ols, ExponentFit, LinearFit};

use std::io::{Read, Write};
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Budget;
use crate::congestion::{certify, YkRouter};
use crate::error::{Error, Result};
use crate::poincare::{h1_sweep, h2_exact, hp_minimize, MinimizerSettings};
use crate::round_tree::yk::YkGraph;

/// `Q = 1 + ln V / ln H`.
pub fn q_of(h: usize, v: usize) -> Result<f64> {
    if h < 2 || v < 1 {
        return Err(Error::invalid(format!(
            "need H >= 2 and V >= 1, got H = {h}, V = {v}"
        )));
    }
    Ok(1.0 + (v as f64).ln() / (h as f64).ln())
}

/// `ε = (Q - p) / (p (Q - p + pQ))`.
pub fn epsilon_of(p: f64, q: f64) -> Result<f64> {
    if !(p >= 1.0 && p < q) {
        return Err(Error::invalid(format!(
            "need 1 <= p < Q, got p = {p}, Q = {q}"
        )));
    }
    Ok((q - p) / (p * (q - p + p * q)))
}

/// One witness sample of a Poincaré profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub graph_id: String,
    pub r: usize,
    pub p: f64,
    /// `r` times a certified lower bound on `h^p`.
    pub lower_bound: f64,
    /// `r` times a numeric upper bound on `h^p`.
    pub upper_estimate: Option<f64>,
    /// Fitted slope over this and all earlier points.
    pub slope_running: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperSettings {
    pub restarts: usize,
    pub seed: u64,
}

pub fn yk_id(h: usize, v: usize, p: f64, k: usize) -> String {
    format!("yk-h{h}-v{v}-p{p}-k{k}")
}

/// Certified profile points for `Y_k`, one per `k`.
pub fn sweep_yk(
    h: usize,
    v: usize,
    p: f64,
    ks: RangeInclusive<usize>,
    upper: Option<UpperSettings>,
    budget: &Budget,
) -> Result<Vec<ProfilePoint>> {
    if ks.is_empty() {
        return Err(Error::invalid("empty k range"));
    }
    let mut points: Vec<ProfilePoint> = ks
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|k| {
            let yk = YkGraph::build(h, v, p, k, budget)?;
            let router = YkRouter::new(&yk);
            let cert = certify(&router, p, budget)?;
            let r = yk.n();
            let upper_estimate = match upper {
                None => None,
                Some(u) => {
                    let value = if p == 1.0 {
                        h1_sweep(&yk.graph)?.value
                    } else if p == 2.0 {
                        h2_exact(&yk.graph)?.value
                    } else {
                        hp_minimize(
                            &yk.graph,
                            p,
                            u.restarts,
                            u.seed,
                            &MinimizerSettings::default(),
                        )?
                        .value
                    };
                    Some(r as f64 * value)
                }
            };
            Ok(ProfilePoint {
                graph_id: yk_id(h, v, p, k),
                r,
                p,
                lower_bound: r as f64 * cert.bound,
                upper_estimate,
                slope_running: None,
            })
        })
        .collect::<Result<_>>()?;
    fill_running_slopes(&mut points);
    Ok(points)
}

pub fn fill_running_slopes(points: &mut [ProfilePoint]) {
    for i in 0..points.len() {
        points[i].slope_running = fit_exponent(&points[..=i]).ok().map(|f| f.slope);
    }
}

pub fn write_points_csv<W: Write>(points: &[ProfilePoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for p in points {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_points_csv<R: Read>(input: R) -> Result<Vec<ProfilePoint>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_examples() {
        assert_eq!(q_of(2, 2).unwrap(), 2.0);
        assert_eq!(q_of(5, 1).unwrap(), 1.0);
        assert!((q_of(4, 2).unwrap() - 1.5).abs() < 1e-15);
        assert!(q_of(1, 2).is_err());
        assert!(q_of(2, 0).is_err());
    }

    #[test]
    fn epsilon_examples() {
        assert!((epsilon_of(1.0, 2.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((epsilon_of(1.5, 2.0).unwrap() - 2.0 / 21.0).abs() < 1e-15);
        assert!(epsilon_of(2.0 - 1e-12, 2.0).unwrap() < 1e-11);
        assert!(epsilon_of(2.0, 2.0).is_err());
        assert!(epsilon_of(0.5, 2.0).is_err());
        for i in 1..=90 {
            let q = 1.0 + i as f64 / 10.0;
            let e = epsilon_of(1.0, q).unwrap();
            assert!((e - (q - 1.0) / (2.0 * q - 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn sweep_y1_example() {
        let pts = sweep_yk(
            2,
            2,
            1.0,
            1..=1,
            Some(UpperSettings {
                restarts: 2,
                seed: 1,
            }),
            &Budget::default(),
        )
        .unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].r, 10);
        assert!(pts[0].lower_bound <= pts[0].upper_estimate.unwrap() + 1e-9);
        assert_eq!(pts[0].slope_running, None);
    }

    #[test]
    fn sweep_sizes_increase_and_csv_round_trips() {
        let pts = sweep_yk(
            2,
            2,
            1.0,
            1..=3,
            Some(UpperSettings {
                restarts: 2,
                seed: 1,
            }),
            &Budget::default(),
        )
        .unwrap();
        assert!(pts.windows(2).all(|w| w[0].r < w[1].r));
        for p in &pts {
            assert!(p.lower_bound <= p.upper_estimate.unwrap() + 1e-9);
        }
        let mut buf = Vec::new();
        write_points_csv(&pts, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("graph_id,r,p,lower_bound,upper_estimate,slope_running\n"));
        assert_eq!(read_points_csv(&buf[..]).unwrap(), pts);
    }

    #[test]
    fn sweep_errors() {
        assert!(sweep_yk(2, 2, 2.0, 1..=1, None, &Budget::default()).is_err());
        let tight = Budget {
            vertices: 50,
            work: u64::MAX,
        };
        assert!(sweep_yk(2, 2, 1.0, 1..=3, None, &tight)
            .unwrap_err()
            .is_budget());
    }
}
