//! Special functions used by the matrix-element formulas.
//!
//! Factorials and Gamma are handled in log space. Laguerre polynomials are
//! evaluated by upward recurrence in the degree with a running exponent, so
//! degrees in the hundreds at arguments of a few thousand stay finite.

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// A real number stored as `sign * exp(ln_abs)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    pub sign: f64,
    pub ln_abs: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog { sign: 0.0, ln_abs: f64::NEG_INFINITY };

    pub fn from_value(v: f64) -> Self {
        if v == 0.0 {
            Self::ZERO
        } else {
            SignedLog { sign: v.signum(), ln_abs: v.abs().ln() }
        }
    }

    pub fn value(self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * self.ln_abs.exp()
        }
    }

    /// `self * sign * exp(ln_factor)`.
    pub fn scale(self, sign: f64, ln_factor: f64) -> Self {
        if self.sign == 0.0 || sign == 0.0 {
            Self::ZERO
        } else {
            SignedLog { sign: self.sign * sign, ln_abs: self.ln_abs + ln_factor }
        }
    }
}

/// Stirling series for `ln Gamma(x)`, accurate to well below 1e-16 for x >= 15.
fn ln_gamma_stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            + inv2
                * (-1.0 / 360.0
                    + inv2
                        * (1.0 / 1260.0
                            + inv2
                                * (-1.0 / 1680.0
                                    + inv2 * (1.0 / 1188.0 + inv2 * (-691.0 / 360_360.0 + inv2 / 156.0))))));
    (x - 0.5) * x.ln() - x + LN_SQRT_2PI + series
}

/// `ln(n!)`.
pub fn ln_factorial(n: u64) -> f64 {
    if n <= 170 {
        let mut prod = 1.0_f64;
        for k in 2..=n {
            prod *= k as f64;
        }
        prod.ln()
    } else {
        ln_gamma_stirling(n as f64 + 1.0)
    }
}

/// `ln Gamma(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidArgument(format!("ln_gamma needs a finite x > 0, got {x}")));
    }
    let mut shift = 0.0;
    let mut z = x;
    while z < 15.0 {
        shift += z.ln();
        z += 1.0;
    }
    Ok(ln_gamma_stirling(z) - shift)
}

/// `Gamma(x)` for `x > 0`.
pub fn gamma(x: f64) -> Result<f64> {
    ln_gamma(x).map(f64::exp)
}

/// Upward three-term recurrence for `L_n^{(k)}(x)`, valid for any integer k.
fn laguerre_recurrence(n: u64, k: f64, x: f64) -> SignedLog {
    const BIG: f64 = 1e150;
    if n == 0 {
        return SignedLog { sign: 1.0, ln_abs: 0.0 };
    }
    let mut prev = 1.0_f64;
    let mut cur = 1.0 + k - x;
    let mut ln_scale = 0.0_f64;
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + k + 1.0 - x) * cur - (jf + k) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
        if cur.abs() > BIG {
            prev /= BIG;
            cur /= BIG;
            ln_scale += BIG.ln();
        }
    }
    SignedLog::from_value(cur).scale(1.0, ln_scale)
}

/// `L_n^{(k)}(x)` in sign/log form.
///
/// A negative superscript `k = -j` with `0 < j <= n` goes through the reduction
/// `L_n^{(-j)}(x) = (-x)^j (n-j)!/n! L_{n-j}^{(j)}(x)`; for `j > n` the
/// polynomial is evaluated directly by the recurrence, which holds for every k.
pub fn ln_laguerre_assoc(n: i64, k: i64, x: f64) -> Result<SignedLog> {
    if n < 0 {
        return Err(Error::InvalidArgument(format!("Laguerre degree must be >= 0, got {n}")));
    }
    let nu = n as u64;
    if k < 0 && (-k) <= n {
        let j = (-k) as u64;
        if x == 0.0 {
            return Ok(SignedLog::ZERO);
        }
        let inner = laguerre_recurrence(nu - j, j as f64, x);
        let sign = if j % 2 == 1 { -x.signum() } else { 1.0 };
        let ln_factor = j as f64 * x.abs().ln() + ln_factorial(nu - j) - ln_factorial(nu);
        return Ok(inner.scale(sign, ln_factor));
    }
    Ok(laguerre_recurrence(nu, k as f64, x))
}

/// Associated Laguerre polynomial `L_n^{(k)}(x)`.
pub fn laguerre_assoc(n: i64, k: i64, x: f64) -> Result<f64> {
    ln_laguerre_assoc(n, k, x).map(SignedLog::value)
}

/// Bessel function of the first kind `J_k(y)` for integer order.
///
/// Negative orders and arguments reduce to `k, y >= 0` through
/// `J_{-k}(y) = (-1)^k J_k(y)` and `J_k(-y) = (-1)^k J_k(y)`.
pub fn bessel_j(k: i64, y: f64) -> f64 {
    let parity = |k: i64| if k.rem_euclid(2) == 1 { -1.0 } else { 1.0 };
    if k < 0 {
        return parity(k) * bessel_j(-k, y);
    }
    if y < 0.0 {
        return parity(k) * bessel_j(k, -y);
    }
    if y == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if y < 1e-8 {
        // two leading terms of the power series
        let half = 0.5 * y;
        let lead = (k as f64 * half.ln() - ln_factorial(k as u64)).exp();
        return lead * (1.0 - half * half / (k as f64 + 1.0));
    }
    miller(k as u64, y)
}

/// Backward recurrence from well above `max(k, y)`, normalised with
/// `J_0 + 2 sum_{m>=1} J_{2m} = 1`.
fn miller(k: u64, y: f64) -> f64 {
    const BIG: f64 = 1e200;
    let top = (k as f64).max(y);
    let mut start = (top + 30.0 + 10.0 * top.cbrt()).ceil() as u64;
    start += start % 2;

    let mut above = 0.0_f64;
    let mut cur = 1e-30_f64;
    let mut norm = 0.0_f64;
    let mut wanted = if k == start { cur } else { 0.0 };
    let two_over_y = 2.0 / y;
    for i in (1..=start).rev() {
        let below = i as f64 * two_over_y * cur - above;
        above = cur;
        cur = below;
        let idx = i - 1;
        if idx == k {
            wanted = cur;
        }
        if idx % 2 == 0 && idx > 0 {
            norm += 2.0 * cur;
        }
        if cur.abs() > BIG {
            above /= BIG;
            cur /= BIG;
            norm /= BIG;
            wanted /= BIG;
        }
    }
    norm += cur;
    wanted / norm
}
