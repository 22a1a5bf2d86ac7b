use serde::{Deserialize, Serialize};

use super::ProfilePoint;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn ols(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Degenerate("need at least two samples".into()));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::Degenerate("non-finite sample".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::Degenerate("all samples share one abscissa".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Power-law fit of `ln bound` against `ln r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub sample_count: usize,
    pub size_range: [usize; 2],
    /// Slope through the three largest samples.
    pub last3_slope: Option<f64>,
}

fn log_pairs(points: &[ProfilePoint]) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut pts: Vec<&ProfilePoint> = points.iter().collect();
    pts.sort_by_key(|p| p.r);
    if pts.windows(2).any(|w| w[0].r == w[1].r) {
        return Err(Error::Degenerate("repeated size".into()));
    }
    if pts
        .iter()
        .any(|p| p.lower_bound.is_nan() || p.lower_bound <= 0.0 || p.r == 0)
    {
        return Err(Error::Degenerate(
            "bounds and sizes must be positive".into(),
        ));
    }
    Ok((
        pts.iter().map(|p| (p.r as f64).ln()).collect(),
        pts.iter().map(|p| p.lower_bound.ln()).collect(),
    ))
}

pub fn fit_exponent(points: &[ProfilePoint]) -> Result<ExponentFit> {
    let (xs, ys) = log_pairs(points)?;
    let fit = ols(&xs, &ys)?;
    let m = xs.len();
    let last3_slope = if m >= 3 {
        Some(ols(&xs[m - 3..], &ys[m - 3..])?.slope)
    } else {
        None
    };
    Ok(ExponentFit {
        slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        sample_count: m,
        size_range: [
            points.iter().map(|p| p.r).min().unwrap_or(0),
            points.iter().map(|p| p.r).max().unwrap_or(0),
        ],
        last3_slope,
    })
}

/// Logarithmic fit `y ≈ slope·ln r + intercept`.
pub fn fit_log(rs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if rs.iter().any(|&r| r.is_nan() || r <= 0.0) {
        return Err(Error::Degenerate("sizes must be positive".into()));
    }
    let xs: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
    ols(&xs, ys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pts(rs: &[usize], f: impl Fn(f64) -> f64) -> Vec<ProfilePoint> {
        rs.iter()
            .map(|&r| ProfilePoint {
                graph_id: format!("g{r}"),
                r,
                p: 1.0,
                lower_bound: f(r as f64),
                upper_estimate: None,
                slope_running: None,
            })
            .collect()
    }

    #[test]
    fn exact_power_laws() {
        let f = fit_exponent(&pts(&[10, 100, 1000, 5000], |r| r.powf(1.0 / 3.0))).unwrap();
        assert!((f.slope - 1.0 / 3.0).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        assert!((f.last3_slope.unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(f.size_range, [10, 5000]);
        let f = fit_exponent(&pts(&[3, 7, 40], |r| 5.0 * r.sqrt())).unwrap();
        assert!((f.slope - 0.5).abs() < 1e-12);
        assert!((f.intercept - 5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(fit_exponent(&pts(&[10], |r| r)).is_err());
        assert!(fit_exponent(&pts(&[10, 10], |r| r)).is_err());
        assert!(fit_exponent(&pts(&[10, 20], |_| 0.0)).is_err());
        assert!(fit_log(&[0.0, 1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn log_model_beats_power_on_logarithmic_data() {
        let rs: Vec<f64> = (6..=12).map(|d| 2f64.powi(d + 1) - 1.0).collect();
        let ys: Vec<f64> = rs.iter().map(|r| 2.0 * r.ln() + 1.0).collect();
        let log = fit_log(&rs, &ys).unwrap();
        let lx: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
        let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
        let pow = ols(&lx, &ly).unwrap();
        assert!(log.r_squared > pow.r_squared);
        assert!((log.slope - 2.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn r_squared_in_unit_interval(ys in proptest::collection::vec(-1e3f64..1e3, 3..20)) {
            let xs: Vec<f64> = (0..ys.len()).map(|i| i as f64).collect();
            let f = ols(&xs, &ys).unwrap();
            prop_assert!((0.0..=1.0).contains(&f.r_squared));
        }

        #[test]
        fn recovers_planted_lines(a in -5.0f64..5.0, b in -5.0f64..5.0) {
            let xs: Vec<f64> = (0..6).map(|i| i as f64 * 0.7).collect();
            let ys: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
            let f = ols(&xs, &ys).unwrap();
            prop_assert!((f.slope - a).abs() < 1e-9);
            prop_assert!((f.intercept - b).abs() < 1e-9);
        }
    }
}
