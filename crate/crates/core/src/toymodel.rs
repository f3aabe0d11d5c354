//! Biased nearest-neighbour hopping on the half-line `n >= 0`.
//!
//! A particle at `n` hops down with rate `(1+p)/2` and up with rate `(1-p)/2`;
//! site 0 only hops up (reflecting boundary).

use crate::error::{Error, Result};
use crate::rates::{RateMatrix, RateMode};
use crate::steady::{solve_steady_state, Distribution};
use nalgebra::DMatrix;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ToyParams {
    pub p: f64,
    pub n_sites: usize,
}

impl ToyParams {
    pub fn new(p: f64, n_sites: usize) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidArgument(format!("toy model needs 0 < p < 1, got {p}")));
        }
        if n_sites < 2 {
            return Err(Error::InvalidArgument(format!("toy model needs at least 2 sites, got {n_sites}")));
        }
        Ok(ToyParams { p, n_sites })
    }
}

/// Relaxation rate of the plane wave `e^{-q n}`: `gamma(q) = 1 + p sinh q - cosh q`.
pub fn dispersion(q: f64, p: f64) -> f64 {
    1.0 + p * q.sinh() - q.cosh()
}

/// Nonzero root of the dispersion, `q = ln((1+p)/(1-p))`.
pub fn steady_q(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!("steady_q needs 0 < p < 1, got {p}")));
    }
    Ok(((1.0 + p) / (1.0 - p)).ln())
}

/// `T_eff = 1/q` for level energies `E_n = n`.
pub fn effective_temperature(p: f64) -> Result<f64> {
    steady_q(p).map(|q| 1.0 / q)
}

/// Mean of the untruncated geometric law, `1/(e^q - 1) = (1-p)/(2p)`.
pub fn geometric_mean(p: f64) -> Result<f64> {
    steady_q(p).map(|q| 1.0 / q.exp_m1())
}

pub fn generator(params: &ToyParams) -> Result<RateMatrix> {
    let n = params.n_sites;
    let down = 0.5 * (1.0 + params.p);
    let up = 0.5 * (1.0 - params.p);
    let mut e = DMatrix::zeros(n, n);
    for k in 0..n - 1 {
        e[(k + 1, k)] = up;
        e[(k, k + 1)] = down;
    }
    RateMatrix::from_entries(e, params.p, RateMode::Toy)
}

pub fn stationary_distribution(params: &ToyParams) -> Result<Distribution> {
    solve_steady_state(&generator(params)?)
}

/// Normalised `e^{-q n}` on the finite lattice, the exact law of the truncated chain.
pub fn geometric_distribution(params: &ToyParams) -> Result<Vec<f64>> {
    let q = steady_q(params.p)?;
    let w: Vec<f64> = (0..params.n_sites).map(|n| (-q * n as f64).exp()).collect();
    let z: f64 = w.iter().sum();
    Ok(w.into_iter().map(|x| x / z).collect())
}

/// Largest `|rho_n G_{n+1<-n} - rho_{n+1} G_{n<-n+1}|` relative to the larger flux.
pub fn detailed_balance_defect(matrix: &RateMatrix, rho: &[f64]) -> f64 {
    (0..matrix.n_max - 1)
        .map(|n| {
            let up = rho[n] * matrix.rate(n + 1, n);
            let down = rho[n + 1] * matrix.rate(n, n + 1);
            let scale = up.abs().max(down.abs());
            if scale == 0.0 {
                0.0
            } else {
                (up - down).abs() / scale
            }
        })
        .fold(0.0, f64::max)
}
