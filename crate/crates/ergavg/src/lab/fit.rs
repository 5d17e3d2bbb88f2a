//! Scaling-exponent extraction: least squares in log–log coordinates for
//! power-law fits, and a plain linear fit for slopes against an exponent
//! variable that is already logarithmic.

use serde::{Deserialize, Serialize};

use crate::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub slope: f64,
    pub intercept: f64,
    /// Maximum absolute deviation of the data from the fitted line, in the
    /// fit's own coordinates.
    pub residual: f64,
}

fn least_squares(xs: &[f64], ys: &[f64]) -> FitSummary {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - (slope * x + intercept)).abs())
        .fold(0.0, f64::max);
    FitSummary {
        slope,
        intercept,
        residual,
    }
}

/// Fits `log y = slope · log x + intercept` through at least three points
/// with distinct positive abscissae and positive ordinates. The residual is
/// the maximum absolute log-deviation.
pub fn fit_scaling(points: &[(f64, f64)]) -> Result<FitSummary> {
    if points.len() < 3 {
        return Err(invalid(format!(
            "scaling fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if points
        .iter()
        .any(|(x, y)| x.is_nan() || *x <= 0.0 || y.is_nan() || *y <= 0.0)
    {
        return Err(invalid("scaling fit requires positive coordinates"));
    }
    let xs: Vec<f64> = points.iter().map(|(x, _)| x.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, y)| y.ln()).collect();
    let mut sorted = xs.clone();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(invalid("scaling fit requires distinct abscissae"));
    }
    Ok(least_squares(&xs, &ys))
}

/// Plain linear least squares `y = slope · x + intercept`; at least two
/// points with distinct abscissae.
pub fn linear_fit(points: &[(f64, f64)]) -> Result<FitSummary> {
    if points.len() < 2 {
        return Err(invalid(format!(
            "linear fit needs at least 2 points, got {}",
            points.len()
        )));
    }
    let xs: Vec<f64> = points.iter().map(|(x, _)| *x).collect();
    let ys: Vec<f64> = points.iter().map(|(_, y)| *y).collect();
    if xs.iter().all(|x| *x == xs[0]) {
        return Err(invalid("linear fit requires distinct abscissae"));
    }
    Ok(least_squares(&xs, &ys))
}
