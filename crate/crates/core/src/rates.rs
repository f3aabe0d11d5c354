//! Classical transition-rate matrix between populations of the dressed lattice.
//!
//! `entries[(n, m)]` is the rate from state `m` into state `n`; the diagonal
//! holds minus the total outflow so every column sums to zero. Index `n` is the
//! pair `(n, +), (n, -)` for `n >= 1` and the dressed vacuum for `n = 0`.

use crate::error::{Error, Result};
use crate::matel::{overlap_at, OverlapPoint, OverlapTable};
use crate::spectrum::{DriveParams, EigenLabel};
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

/// Which eigenstates supply the photon matrix elements in exact mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum OverlapSource {
    /// Overlaps at `eps = 1`, with `u, v` at the actual drive.
    #[default]
    Critical,
    /// Overlaps between the eigenstates at the actual drive.
    AtDrive,
}

impl OverlapSource {
    pub fn point(self, params: &DriveParams) -> OverlapPoint {
        match self {
            OverlapSource::Critical => OverlapPoint::Critical,
            OverlapSource::AtDrive => OverlapPoint::AtDrive(*params),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RateMode {
    /// Rates from exact overlaps. `interbranch` adds the `(n,-) <- (m,+)` channel.
    Exact { interbranch: bool, overlaps: OverlapSource },
    /// Closed power-law form.
    Asymptotic,
    /// Nearest-neighbour hopping chain.
    Toy,
    /// Supplied directly.
    Custom,
}

impl RateMode {
    pub fn exact() -> Self {
        RateMode::Exact { interbranch: false, overlaps: OverlapSource::Critical }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            RateMode::Exact { .. } => "exact",
            RateMode::Asymptotic => "asymptotic",
            RateMode::Toy => "toy",
            RateMode::Custom => "custom",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RateMatrix {
    pub n_max: usize,
    pub p: f64,
    pub mode: RateMode,
    pub entries: DMatrix<f64>,
    /// Off-diagonal entries of the asymptotic form that came out negative and were set to zero.
    pub clamped: usize,
}

impl RateMatrix {
    /// Wrap off-diagonal rates, fill the diagonal from the sum rule and validate.
    pub fn from_entries(mut entries: DMatrix<f64>, p: f64, mode: RateMode) -> Result<Self> {
        let n_max = entries.nrows();
        if entries.ncols() != n_max {
            return Err(Error::InvalidArgument(format!("rate matrix must be square, got {}x{}", n_max, entries.ncols())));
        }
        if n_max < 2 {
            return Err(Error::InvalidArgument("rate matrix needs at least 2 states".into()));
        }
        for m in 0..n_max {
            let mut out = 0.0;
            for n in 0..n_max {
                if n == m {
                    continue;
                }
                let v = entries[(n, m)];
                if !(v >= 0.0) {
                    return Err(Error::NegativeRate { row: n, col: m, value: v });
                }
                out += v;
            }
            entries[(m, m)] = -out;
        }
        Ok(RateMatrix { n_max, p, mode, entries, clamped: 0 })
    }

    /// Rate from `from` into `to`.
    pub fn rate(&self, to: usize, from: usize) -> f64 {
        self.entries[(to, from)]
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.amax()
    }

    /// Largest `|sum_n entries[(n, m)]|` over columns.
    pub fn column_sum_defect(&self) -> f64 {
        self.entries.column_iter().map(|c| c.sum().abs()).fold(0.0, f64::max)
    }
}

/// `((n+m)/2) |n-m|^{-10/3} (1 + p |n-m|^{1/3} sign(m-n))`, the rate from `m` into `n`.
pub fn asymptotic_rate(n: usize, m: usize, p: f64) -> f64 {
    if n == m {
        return 0.0;
    }
    let d = (n as f64 - m as f64).abs();
    let sign = if m > n { 1.0 } else { -1.0 };
    0.5 * (n + m) as f64 * d.powf(-10.0 / 3.0) * (1.0 + p * d.cbrt() * sign)
}

/// `Gamma_{nu mu} = |<nu|(u a + v a^dag)|mu>|^2`, the rate from `mu` into `nu`.
pub fn gamma_exact(nu: EigenLabel, mu: EigenLabel, params: &DriveParams, source: OverlapSource) -> Result<f64> {
    if nu == mu {
        return Err(Error::InvalidArgument("gamma_exact needs distinct states".into()));
    }
    let pt = source.point(params);
    let amp = params.u * overlap_at(pt, nu, mu) + params.v * overlap_at(pt, mu, nu);
    Ok(amp * amp)
}

/// `(-1)^{n-m+1}`, relating `A_{n,-s|m,-r}` to `A_{n,s|m,r}`.
fn parity(n: usize, m: usize) -> f64 {
    if (n + m + 1) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn exact_columns(n_max: usize, params: &DriveParams, interbranch: bool, source: OverlapSource) -> Result<Vec<Vec<f64>>> {
    let (u, v) = (params.u, params.v);
    match source {
        OverlapSource::Critical => {
            let t = OverlapTable::build(n_max - 1, interbranch)?;
            Ok((0..n_max)
                .into_par_iter()
                .map(|m| {
                    (0..n_max)
                        .map(|n| {
                            if n == m {
                                0.0
                            } else if m == 0 {
                                // both branches of level n are fed from the vacuum
                                2.0 * (v * t.plus(0, n)).powi(2)
                            } else if n == 0 {
                                (u * t.plus(0, m)).powi(2)
                            } else {
                                let mut g = (u * t.plus(n, m) + v * t.plus(m, n)).powi(2);
                                if let Some(a_nm) = t.minus(n, m) {
                                    // A_{m,+|n,-} = (-1)^{m-n+1} A_{m,-|n,+}
                                    let a_mn = parity(m, n) * t.minus(m, n).unwrap_or(0.0);
                                    g += (u * a_nm + v * a_mn).powi(2);
                                }
                                g
                            }
                        })
                        .collect()
                })
                .collect())
        }
        OverlapSource::AtDrive => {
            let cols: Result<Vec<Vec<f64>>> = (0..n_max)
                .into_par_iter()
                .map(|m| {
                    (0..n_max)
                        .map(|n| {
                            if n == m {
                                return Ok(0.0);
                            }
                            let mu = EigenLabel::plus(m as u32);
                            if m == 0 {
                                let up = gamma_exact(EigenLabel::plus(n as u32), mu, params, source)?;
                                let dn = gamma_exact(EigenLabel::minus(n as u32), mu, params, source)?;
                                return Ok(up + dn);
                            }
                            let mut g = gamma_exact(EigenLabel::plus(n as u32), mu, params, source)?;
                            if interbranch && n > 0 {
                                g += gamma_exact(EigenLabel::minus(n as u32), mu, params, source)?;
                            }
                            Ok(g)
                        })
                        .collect()
                })
                .collect();
            cols
        }
    }
}

/// Rate matrix on `n = 0 .. n_max-1`.
///
/// Exact mode takes `eps` from `p = 2 sqrt(1 - eps^2)`. In asymptotic mode
/// entries that the closed form drives negative (`p |n-m|^{1/3} > 1`) are set
/// to zero and counted in `clamped`.
pub fn build_rate_matrix(n_max: usize, p: f64, mode: RateMode) -> Result<RateMatrix> {
    if n_max < 2 {
        return Err(Error::InvalidArgument(format!("n_max must be at least 2, got {n_max}")));
    }
    if !(p > 0.0) {
        return Err(Error::InvalidArgument(format!("asymmetry p must be positive, got {p}")));
    }
    let (columns, clamped) = match mode {
        RateMode::Asymptotic => {
            if p > 2.0 {
                return Err(Error::InvalidArgument(format!("asymmetry p = {p} exceeds 2")));
            }
            let cols: Vec<(Vec<f64>, usize)> = (0..n_max)
                .into_par_iter()
                .map(|m| {
                    let mut neg = 0;
                    let col = (0..n_max)
                        .map(|n| {
                            let r = asymptotic_rate(n, m, p);
                            if r < 0.0 {
                                neg += 1;
                                0.0
                            } else {
                                r
                            }
                        })
                        .collect();
                    (col, neg)
                })
                .collect();
            let clamped = cols.iter().map(|c| c.1).sum();
            (cols.into_iter().map(|c| c.0).collect::<Vec<_>>(), clamped)
        }
        RateMode::Exact { interbranch, overlaps } => {
            let params = DriveParams::from_asymmetry(p)?;
            (exact_columns(n_max, &params, interbranch, overlaps)?, 0)
        }
        RateMode::Toy | RateMode::Custom => {
            return Err(Error::InvalidArgument(format!("{} matrices are built by their owners", mode.tag())));
        }
    };
    let entries = DMatrix::from_vec(n_max, n_max, columns.concat());
    let mut out = RateMatrix::from_entries(entries, p, mode)?;
    out.clamped = clamped;
    Ok(out)
}

/// Product of forward rates over product of reverse rates around a closed cycle.
///
/// The cycle visits `cycle[0] -> cycle[1] -> ... -> cycle[k-1] -> cycle[0]`;
/// a repeated first state at the end is accepted and dropped.
pub fn kolmogorov_cycle_ratio(matrix: &RateMatrix, cycle: &[usize]) -> Result<f64> {
    let mut states = cycle.to_vec();
    if states.len() > 1 && states.first() == states.last() {
        states.pop();
    }
    if states.len() < 3 {
        return Err(Error::InvalidArgument("a cycle needs at least 3 distinct states".into()));
    }
    if let Some(&bad) = states.iter().find(|&&s| s >= matrix.n_max) {
        return Err(Error::InvalidArgument(format!("state {bad} outside the matrix")));
    }
    let mut ln_ratio = 0.0;
    for i in 0..states.len() {
        let a = states[i];
        let b = states[(i + 1) % states.len()];
        let fwd = matrix.rate(b, a);
        let rev = matrix.rate(a, b);
        if fwd == 0.0 {
            return Err(Error::ZeroRateEdge { from: a, to: b });
        }
        if rev == 0.0 {
            return Err(Error::ZeroRateEdge { from: b, to: a });
        }
        ln_ratio += fwd.ln() - rev.ln();
    }
    Ok(ln_ratio.exp())
}

/// Closed form of the cycle ratio for `(n+1, n, n-1)` in the asymptotic matrix.
pub fn three_cycle_closed_form(p: f64) -> f64 {
    let c = 2.0_f64.cbrt() * p;
    (1.0 + p).powi(2) * (1.0 - c) / ((1.0 - p).powi(2) * (1.0 + c))
}
