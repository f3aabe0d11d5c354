//! Ordinary least-squares line fits, used for every exponent and decay-length
//! extraction in the crate.

use crate::error::{Error, Result};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub slope_stderr: f64,
    pub r_squared: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() {
        return Err(Error::InvalidArgument(format!("fit inputs differ in length: {} vs {}", x.len(), y.len())));
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!("{n} points, need at least 2")));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|xi| (xi - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(xi, yi)| (xi - mx) * (yi - my)).sum();
    let syy: f64 = y.iter().map(|yi| (yi - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x.iter().zip(y).map(|(xi, yi)| (yi - intercept - slope * xi).powi(2)).sum();
    let slope_stderr = if n > 2 { (sse / (nf - 2.0) / sxx).sqrt() } else { 0.0 };
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    Ok(LinearFit { slope, intercept, slope_stderr, r_squared })
}

/// Fit `y ~ C x^a` on a log-log scale; returns the line in log coordinates.
pub fn power_law_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    let mut lx = Vec::with_capacity(x.len());
    let mut ly = Vec::with_capacity(y.len());
    for (i, (&xi, &yi)) in x.iter().zip(y).enumerate() {
        if !(xi > 0.0) || !(yi > 0.0) {
            return Err(Error::InvalidArgument(format!("power-law fit needs positive data, point {i} = ({xi}, {yi})")));
        }
        lx.push(xi.ln());
        ly.push(yi.ln());
    }
    linear_fit(&lx, &ly)
}
