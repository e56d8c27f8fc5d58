//! Least-squares slopes of risk against sample size.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Abscissa transform applied to `n`; the ordinate is always `ln risk`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateScale {
    /// `ln n`: the slope is the polynomial exponent.
    #[default]
    LogLog,
    /// `ln ln n`: the slope is the logarithmic exponent.
    LogLogLog,
    /// `ln` of the supplied rate function `n^exponent`; slope near 1 means the
    /// risk follows that rate.
    Transformed { exponent: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Fits `ln risk = intercept + slope · x(n)`. Needs at least 4 points with
/// strictly increasing `n` and positive risks.
pub fn rate_regression(points: &[(usize, f64)], scale: RateScale) -> Result<RateFit> {
    if points.len() < 4 {
        return Err(Error::DegenerateGrid(format!("need at least 4 grid points, got {}", points.len())));
    }
    if points.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::DegenerateGrid("sample sizes must be strictly increasing".into()));
    }
    if let Some((n, r)) = points.iter().find(|(_, r)| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::DegenerateGrid(format!("risk at n = {n} is not positive: {r}")));
    }
    let xs: Vec<f64> = points
        .iter()
        .map(|&(n, _)| {
            let n = n as f64;
            match scale {
                RateScale::LogLog => n.ln(),
                RateScale::LogLogLog => n.ln().ln(),
                RateScale::Transformed { exponent } => exponent * n.ln(),
            }
        })
        .collect();
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::DegenerateGrid("transformed sample size is not finite".into()));
    }
    let ys: Vec<f64> = points.iter().map(|&(_, r)| r.ln()).collect();
    let len = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / len;
    let my = ys.iter().sum::<f64>() / len;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::DegenerateGrid("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let r_squared = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    Ok(RateFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    })
}
