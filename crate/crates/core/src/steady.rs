//! Stationary populations of a rate matrix, their mean and decay length.

use crate::error::{Error, Result};
use crate::fit::{linear_fit, LinearFit};
use crate::rates::{build_rate_matrix, RateMatrix, RateMode};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

/// Entries below this are an error; entries between it and zero are round-off.
pub const NEGATIVE_CLAMP: f64 = 1e-8;
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    /// Normalisation row in place of row 0, dense LU.
    Bordered,
    /// Shifted inverse iteration started from the bordered solution.
    InverseIteration,
}

#[derive(Debug, Clone, Serialize)]
pub struct Distribution {
    pub n_max: usize,
    pub rho: Vec<f64>,
    pub p: f64,
    /// Mode tag of the generating matrix.
    pub provenance: String,
    /// `||Gamma rho||_inf` against the unmodified matrix.
    pub residual: f64,
    pub solver: SolverKind,
}

fn residual_of(entries: &DMatrix<f64>, rho: &DVector<f64>) -> f64 {
    (entries * rho).amax()
}

/// Clamp round-off negatives and normalise to unit sum.
fn clean(mut rho: DVector<f64>) -> Result<DVector<f64>> {
    let total = rho.sum();
    if !(total.is_finite() && total != 0.0) {
        return Err(Error::DegenerateNullspace);
    }
    rho /= total;
    for (i, x) in rho.iter_mut().enumerate() {
        if *x < -NEGATIVE_CLAMP {
            return Err(Error::NegativePopulation { index: i, value: *x });
        }
        if *x < 0.0 {
            *x = 0.0;
        }
    }
    let total = rho.sum();
    Ok(rho / total)
}

fn inverse_iteration(entries: &DMatrix<f64>, start: &DVector<f64>) -> Option<DVector<f64>> {
    let n = entries.nrows();
    let shift = 1e-10 * entries.amax();
    let shifted = entries - DMatrix::identity(n, n) * shift;
    let lu = shifted.lu();
    let mut x = start.clone();
    for _ in 0..20 {
        let y = lu.solve(&x)?;
        let norm = y.amax();
        if !(norm.is_finite() && norm > 0.0) {
            return None;
        }
        x = y / norm;
    }
    Some(x)
}

/// Right nullvector of `matrix`, normalised to a probability distribution.
pub fn solve_steady_state(matrix: &RateMatrix) -> Result<Distribution> {
    solve_steady_state_with_tol(matrix, DEFAULT_RESIDUAL_TOL)
}

/// As [`solve_steady_state`] with residual bound `tol * max|Gamma|`.
pub fn solve_steady_state_with_tol(matrix: &RateMatrix, tol: f64) -> Result<Distribution> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("residual tolerance must be positive, got {tol}")));
    }
    let n = matrix.n_max;
    let gamma = &matrix.entries;
    let scale = matrix.max_abs();
    let bound = tol * scale;

    let mut bordered = gamma.clone();
    bordered.row_mut(0).fill(1.0);
    let lu = bordered.lu();
    let u = lu.u();
    let pivots = u.diagonal().map(f64::abs);
    let (pmin, pmax) = (pivots.min(), pivots.max());
    if !(pmin > f64::EPSILON * n as f64 * pmax) {
        return Err(Error::DegenerateNullspace);
    }
    let mut rhs = DVector::zeros(n);
    rhs[0] = 1.0;
    let raw = lu.solve(&rhs).ok_or(Error::DegenerateNullspace)?;
    let rho = clean(raw.clone())?;
    let residual = residual_of(gamma, &rho);
    if residual <= bound {
        return Ok(Distribution {
            n_max: n,
            rho: rho.iter().copied().collect(),
            p: matrix.p,
            provenance: matrix.mode.tag().to_string(),
            residual,
            solver: SolverKind::Bordered,
        });
    }
    log::debug!("bordered residual {residual:e} above {bound:e}; trying inverse iteration");
    let refined = inverse_iteration(gamma, &raw).ok_or(Error::NonConvergence { residual, bound })?;
    let rho = clean(refined)?;
    let residual2 = residual_of(gamma, &rho);
    if residual2 <= bound {
        return Ok(Distribution {
            n_max: n,
            rho: rho.iter().copied().collect(),
            p: matrix.p,
            provenance: matrix.mode.tag().to_string(),
            residual: residual2,
            solver: SolverKind::InverseIteration,
        });
    }
    Err(Error::NonConvergence { residual: residual.min(residual2), bound })
}

/// `sum_n n rho(n)`.
pub fn mean_quantum_number(dist: &Distribution) -> f64 {
    dist.rho.iter().enumerate().map(|(n, r)| n as f64 * r).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    pub xi: f64,
    pub window: (usize, usize),
    pub fit: LinearFit,
}

/// `[10, min(4 nbar, n_max / 4)]`.
pub fn default_window(dist: &Distribution) -> (usize, usize) {
    let nbar = mean_quantum_number(dist);
    let hi = ((4.0 * nbar).floor() as usize).min(dist.n_max / 4);
    (10, hi)
}

/// Least-squares slope of `ln rho(n)` on `n_lo ..= n_hi`; `xi = -1/slope`.
pub fn fit_decay_length(dist: &Distribution, window: (usize, usize)) -> Result<DecayFit> {
    let (lo, hi) = window;
    if hi >= dist.n_max {
        return Err(Error::InvalidArgument(format!("window end {hi} beyond n_max = {}", dist.n_max)));
    }
    if hi < lo + 1 {
        return Err(Error::InsufficientData(format!("window [{lo}, {hi}] holds fewer than 2 points")));
    }
    let mut xs = Vec::with_capacity(hi - lo + 1);
    let mut ys = Vec::with_capacity(hi - lo + 1);
    for n in lo..=hi {
        let r = dist.rho[n];
        if !(r > 0.0) {
            return Err(Error::NonPositiveWindow { index: n, value: r });
        }
        xs.push(n as f64);
        ys.push(r.ln());
    }
    let fit = linear_fit(&xs, &ys)?;
    Ok(DecayFit { xi: -1.0 / fit.slope, window, fit })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub p: f64,
    pub nbar: f64,
    /// `None` when the default window is too short or hits a zero.
    pub xi: Option<f64>,
    pub residual: f64,
    pub clamped: usize,
}

/// Solve the steady state at every `p`. Rows are independent: a failing `p`
/// yields an error in its own slot and the sweep continues.
pub fn sweep_nbar_vs_p(p_values: &[f64], n_max: usize, mode: RateMode) -> Vec<Result<SweepRow>> {
    p_values
        .par_iter()
        .map(|&p| {
            let m = build_rate_matrix(n_max, p, mode)?;
            let dist = solve_steady_state(&m)?;
            let nbar = mean_quantum_number(&dist);
            let xi = fit_decay_length(&dist, default_window(&dist)).ok().map(|f| f.xi);
            Ok(SweepRow { p, nbar, xi, residual: dist.residual, clamped: m.clamped })
        })
        .collect()
}
