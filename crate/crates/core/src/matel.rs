//! Photon matrix elements `A_{n,s|m,r} = <n,s|a|m,r>` between driven
//! eigenstates, their symmetric/antisymmetric parts and eigenstate averages.
//!
//! Two evaluation routes exist. [`ladder_overlap_exact`] is the closed
//! four-term Laguerre sum at the critical point, where the spinor overlap is
//! -1 and every displacement is `-s sqrt(n)`. [`overlap_at`] builds the same
//! quantity from displaced-Fock elements for any `0 <= eps <= 1` and also
//! covers the vacuum.

use crate::error::{Error, Result};
use crate::specfun::{bessel_j, gamma, ln_factorial, ln_laguerre_assoc, SignedLog};
use crate::spectrum::{Branch, DriveParams, EigenLabel};
use rayon::prelude::*;
use serde::Serialize;

/// Which drive enters the eigenstates used for the overlaps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum OverlapPoint {
    /// `eps = 1`: the leading behaviour kept by the critical theory.
    Critical,
    /// Eigenstates at the actual drive.
    AtDrive(DriveParams),
}

impl OverlapPoint {
    fn epsilon(self) -> f64 {
        match self {
            OverlapPoint::Critical => 1.0,
            OverlapPoint::AtDrive(d) => d.epsilon,
        }
    }
}

/// `alpha^k L_d^{(k)}(alpha^2)` for real alpha and any integer k, in sign/log form.
fn ln_power_laguerre(d: i64, k: i64, alpha: f64) -> Result<SignedLog> {
    if d < 0 {
        return Ok(SignedLog::ZERO);
    }
    let x = alpha * alpha;
    if k >= 0 {
        if k > 0 && alpha == 0.0 {
            return Ok(SignedLog::ZERO);
        }
        let lag = ln_laguerre_assoc(d, k, x)?;
        let sign = if k % 2 == 1 { alpha.signum() } else { 1.0 };
        let ln_pow = if k == 0 { 0.0 } else { k as f64 * alpha.abs().ln() };
        return Ok(lag.scale(sign, ln_pow));
    }
    let j = -k;
    if j <= d {
        // alpha^{-j} (-alpha^2)^j (d-j)!/d! L_{d-j}^{(j)} = (-alpha)^j (d-j)!/d! L_{d-j}^{(j)}
        if alpha == 0.0 {
            return Ok(SignedLog::ZERO);
        }
        let lag = ln_laguerre_assoc(d - j, j, x)?;
        let sign = if j % 2 == 1 { -alpha.signum() } else { 1.0 };
        let ln_factor = j as f64 * alpha.abs().ln() + ln_factorial((d - j) as u64) - ln_factorial(d as u64);
        return Ok(lag.scale(sign, ln_factor));
    }
    if alpha == 0.0 {
        return Err(Error::InvalidArgument(format!("alpha^{k} L_{d}^({k}) is singular at alpha = 0")));
    }
    let lag = ln_laguerre_assoc(d, k, x)?;
    let sign = if j % 2 == 1 { alpha.signum() } else { 1.0 };
    Ok(lag.scale(sign, k as f64 * alpha.abs().ln()))
}

/// Displaced-Fock element `<p|D(alpha)|q>` for real alpha.
pub fn displaced_fock(p: i64, q: i64, alpha: f64) -> f64 {
    if p < 0 || q < 0 {
        return 0.0;
    }
    let half_x = 0.5 * alpha * alpha;
    let (lo, hi, a) = if p >= q { (q, p, alpha) } else { (p, q, -alpha) };
    let k = hi - lo;
    // non-negative superscript: cannot fail
    let term = ln_power_laguerre(lo, k, a).expect("non-negative Laguerre superscript");
    let ln_norm = 0.5 * (ln_factorial(lo as u64) - ln_factorial(hi as u64)) - half_x;
    term.scale(1.0, ln_norm).value()
}

/// `<p|D(d)(a + gamma)|q>`.
fn shifted_ladder(p: i64, q: i64, d: f64, gamma: f64) -> f64 {
    let mut out = 0.0;
    if q >= 1 {
        out += (q as f64).sqrt() * displaced_fock(p, q - 1, d);
    }
    if gamma != 0.0 {
        out += gamma * displaced_fock(p, q, d);
    }
    out
}

/// `<bra|a|ket>` from displaced-Fock elements, valid for every label including the vacuum.
pub fn overlap_at(point: OverlapPoint, bra: EigenLabel, ket: EigenLabel) -> f64 {
    let eps = point.epsilon();
    let c = -eps;
    if ket.is_vacuum() {
        return 0.0;
    }
    let (m, r) = (ket.n() as i64, ket.branch().sign());
    let gamma = -eps * ket.nu();
    if bra.is_vacuum() {
        // |0> = chi_R |vac>, undisplaced
        let d = gamma;
        return std::f64::consts::FRAC_1_SQRT_2
            * (shifted_ladder(0, m, d, gamma) + r * c * shifted_ladder(0, m - 1, d, gamma));
    }
    let (n, s) = (bra.n() as i64, bra.branch().sign());
    let beta = -eps * bra.nu();
    let d = gamma - beta;
    0.5 * (shifted_ladder(n, m, d, gamma)
        + s * r * shifted_ladder(n - 1, m - 1, d, gamma)
        + r * c * shifted_ladder(n, m - 1, d, gamma)
        + s * c * shifted_ladder(n - 1, m, d, gamma))
}

/// Critical-point overlap `A_{n,s|m,r}` from the closed four-term Laguerre sum
/// with `alpha = s sqrt(n) - r sqrt(m)`.
///
/// The sum is the contribution of `a` alone; `D(b)^dag a D(c) = D(c-b)(a + c)`
/// also carries `c <n,s|m,r>`, which survives on the diagonal as `-r sqrt(m)`.
pub fn ladder_overlap_exact(n: u32, s: Branch, m: u32, r: Branch) -> Result<f64> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidArgument("ladder_overlap_exact needs n, m >= 1; use vacuum_overlap".into()));
    }
    let (ni, mi) = (n as i64, m as i64);
    let (sf, rf) = (s.sign(), r.sign());
    let alpha = sf * (n as f64).sqrt() - rf * (m as f64).sqrt();
    let lf = |k: u32| ln_factorial(k as u64);
    let half = -0.5 * alpha * alpha - std::f64::consts::LN_2;
    let terms = [
        (1.0, 0.5 * (lf(m) - lf(n)), ni - mi + 1, mi - 1),
        (-sf, 0.5 * (lf(m) - lf(n - 1)), ni - mi, mi - 1),
        (-rf, 0.5 * (lf(m - 1) - lf(n)), ni - mi + 2, mi - 2),
        (rf * sf, 0.5 * (lf(m - 1) - lf(n - 1)), ni - mi + 1, mi - 2),
    ];
    let mut sum = 0.0;
    for (coef, ln_fact, k, deg) in terms {
        sum += ln_power_laguerre(deg, k, alpha)?.scale(coef, ln_fact + half).value();
    }
    if n == m && s == r {
        sum -= rf * (m as f64).sqrt();
    }
    Ok(sum)
}

/// `<0|a|m,r>` at the critical point. `m = 0` gives `<0|a|0> = 0`.
pub fn vacuum_overlap(m: u32, r: Branch) -> f64 {
    overlap_at(OverlapPoint::Critical, EigenLabel::VACUUM, EigenLabel::new(m, r))
}

/// Scaling function `f(delta) = J_{delta-1}(delta) / delta`, with
/// `A_{n,+|n+delta,+} ~ sqrt(n) f(delta)`.
pub fn ladder_overlap_asymptotic(delta: i64) -> Result<f64> {
    if delta == 0 {
        return Err(Error::InvalidArgument("scaling function undefined at delta = 0".into()));
    }
    Ok(bessel_j(delta - 1, delta as f64) / delta as f64)
}

/// Symmetric part `S` and ratio `B` of the upper-branch matrix elements.
///
/// For `n = m` the ratio is 0/0 and `B = 0` by convention.
pub fn s_b_exact(n: u32, m: u32) -> Result<(f64, f64)> {
    let a_nm = ladder_overlap_exact(n, Branch::Plus, m, Branch::Plus)?;
    let a_mn = ladder_overlap_exact(m, Branch::Plus, n, Branch::Plus)?;
    let s = 0.5 * (a_nm + a_mn);
    if n == m {
        return Ok((s, 0.0));
    }
    let denom = a_nm + a_mn;
    if denom.abs() < 1e-14 {
        return Err(Error::DegenerateDenominator { n: n as usize, m: m as usize, value: denom });
    }
    Ok((s, (a_nm - a_mn) / denom))
}

/// Unit-prefactor power laws `S = sqrt(n+m) |n-m|^{-5/3}`, `B = |n-m|^{1/3} sign(m-n)`.
pub fn s_b_asymptotic(n: u32, m: u32) -> Result<(f64, f64)> {
    if n == m {
        return Err(Error::InvalidArgument("asymptotic S, B undefined on the diagonal".into()));
    }
    let d = (n as f64 - m as f64).abs();
    let sign = if m > n { 1.0 } else { -1.0 };
    Ok(((n as f64 + m as f64).sqrt() * d.powf(-5.0 / 3.0), sign * d.cbrt()))
}

/// `A_{n,+|n+delta,-}`, the interbranch element.
pub fn interbranch_overlap(n: u32, delta: i64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("interbranch overlap needs n >= 1".into()));
    }
    let m = n as i64 + delta;
    if m < 1 {
        return Err(Error::InvalidArgument(format!("n + delta = {m} must be >= 1")));
    }
    ladder_overlap_exact(n, Branch::Plus, m as u32, Branch::Minus)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AiryConstants {
    /// `(4/3)^{1/3} / Gamma(1/3)`, prefactor of `s(y) ~ C_s y^{-5/3}`.
    pub c_s: f64,
    /// `(2/9)^{1/3} / Gamma(2/3)`, prefactor of `a(y) ~ C_a y^{-4/3}`.
    pub c_a: f64,
    /// `Gamma(1/3) / (6^{1/3} Gamma(2/3))`, prefactor of `a/s ~ y^{1/3}`.
    pub ratio_prefactor: f64,
}

pub fn airy_constants() -> AiryConstants {
    let g13 = gamma(1.0 / 3.0).expect("positive argument");
    let g23 = gamma(2.0 / 3.0).expect("positive argument");
    AiryConstants {
        c_s: (4.0_f64 / 3.0).cbrt() / g13,
        c_a: (2.0_f64 / 9.0).cbrt() / g23,
        ratio_prefactor: g13 / (6.0_f64.cbrt() * g23),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenExpectations {
    /// `<a>`, real for every eigenstate.
    pub a: f64,
    pub n_phot: f64,
    pub sigma: [f64; 3],
}

/// Expectation values of `a`, `a^dag a` and the Pauli vector in a driven eigenstate.
pub fn eigenstate_expectations(label: EigenLabel, params: &DriveParams) -> EigenExpectations {
    let eps = params.epsilon;
    let eta = params.eta;
    if label.is_vacuum() {
        return EigenExpectations { a: 0.0, n_phot: params.v * params.v, sigma: [-eps, 0.0, -params.gap().sqrt()] };
    }
    let n = label.n() as f64;
    EigenExpectations {
        a: -1.5 * eps * eta.exp() * label.nu(),
        n_phot: (2.0 * eps * eps * (2.0 * eta).exp() + (2.0 * eta).cosh()) * n - 0.5,
        sigma: [-eps, 0.0, 0.0],
    }
}

/// Critical-point overlaps `A_{n,+|m,s}` for `0 <= n, m <= n_max`, vacuum at index 0.
///
/// `plus[n][m] = A_{n,+|m,+}`; `minus[n][m] = A_{n,-|m,+}` is filled only on request.
#[derive(Debug, Clone)]
pub struct OverlapTable {
    pub n_max: usize,
    plus: Vec<f64>,
    minus: Option<Vec<f64>>,
}

impl OverlapTable {
    pub fn build(n_max: usize, with_interbranch: bool) -> Result<Self> {
        let dim = n_max + 1;
        let row = |bra_branch: Branch, n: usize| -> Result<Vec<f64>> {
            (0..dim)
                .map(|m| {
                    if m == 0 {
                        Ok(0.0)
                    } else if n == 0 {
                        Ok(vacuum_overlap(m as u32, Branch::Plus))
                    } else {
                        ladder_overlap_exact(n as u32, bra_branch, m as u32, Branch::Plus)
                    }
                })
                .collect()
        };
        let fill = |b: Branch| -> Result<Vec<f64>> {
            let rows: Result<Vec<Vec<f64>>> = (0..dim).into_par_iter().map(|n| row(b, n)).collect();
            Ok(rows?.concat())
        };
        let plus = fill(Branch::Plus)?;
        let minus = if with_interbranch { Some(fill(Branch::Minus)?) } else { None };
        Ok(OverlapTable { n_max, plus, minus })
    }

    /// `A_{n,+|m,+}`.
    pub fn plus(&self, n: usize, m: usize) -> f64 {
        self.plus[n * (self.n_max + 1) + m]
    }

    /// `A_{n,-|m,+}` (equal to `A_{n,+|m,+}` at the vacuum row).
    pub fn minus(&self, n: usize, m: usize) -> Option<f64> {
        self.minus.as_ref().map(|v| v[n * (self.n_max + 1) + m])
    }
}
