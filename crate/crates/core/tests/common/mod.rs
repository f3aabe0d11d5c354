//! Brute-force Fock-space construction of the driven eigenstates, shared by
//! the integration tests.

#![allow(dead_code)]

use blockade_core::EigenLabel;
use nalgebra::{DMatrix, DVector, Matrix2};

/// Ladder states built from a truncated boson space times a spin.
///
/// Index `2k + 0` is `|k, up>`, `2k + 1` is `|k, down>`.
pub struct FockOracle {
    pub dim: usize,
    pub epsilon: f64,
    pub chi_r: [f64; 2],
    pub chi_l: [f64; 2],
    /// `tau_- / u`, finite up to and including `eps = 1`.
    pub tau_minus: Matrix2<f64>,
}

impl FockOracle {
    pub fn new(epsilon: f64, dim: usize) -> Self {
        // tanh(eta) = v/u, with tanh(2 eta) = eps^2 / (2 - eps^2)
        let t = if epsilon >= 1.0 {
            1.0
        } else {
            let eta = -0.25 * (1.0 - epsilon * epsilon).ln();
            eta.tanh()
        };
        let c = t.sqrt();
        let tau_minus = Matrix2::new(c, t, 1.0, c);
        let svd = tau_minus.svd(true, true);
        let (k, _) = svd.singular_values.argmin();
        let null = svd.v_t.unwrap().row(k).transpose();
        let sign = if null[1] < 0.0 { -1.0 } else { 1.0 };
        let chi_r = [sign * null[0], sign * null[1]];
        let chi_l = [chi_r[1], chi_r[0]];
        FockOracle { dim, epsilon, chi_r, chi_l, tau_minus }
    }

    /// `D(alpha) = exp(alpha (a^dag - a))` on the truncated space.
    pub fn displacement(&self, alpha: f64) -> DMatrix<f64> {
        let mut gen = DMatrix::zeros(self.dim, self.dim);
        for k in 0..self.dim - 1 {
            let s = ((k + 1) as f64).sqrt();
            gen[(k + 1, k)] = alpha * s;
            gen[(k, k + 1)] = -alpha * s;
        }
        gen.exp()
    }

    pub fn state(&self, label: EigenLabel) -> DVector<f64> {
        let mut psi = DVector::zeros(2 * self.dim);
        if label.is_vacuum() {
            psi[0] = self.chi_r[0];
            psi[1] = self.chi_r[1];
            return psi;
        }
        let n = label.n() as usize;
        let s = label.branch().sign();
        let alpha = -self.epsilon * label.nu();
        let d = self.displacement(alpha);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for k in 0..self.dim {
            for sp in 0..2 {
                psi[2 * k + sp] = h * (d[(k, n)] * self.chi_r[sp] + s * d[(k, n - 1)] * self.chi_l[sp]);
            }
        }
        psi
    }

    pub fn apply_a(&self, psi: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(2 * self.dim);
        for k in 0..self.dim - 1 {
            let s = ((k + 1) as f64).sqrt();
            for sp in 0..2 {
                out[2 * k + sp] = s * psi[2 * (k + 1) + sp];
            }
        }
        out
    }

    pub fn apply_a_dag(&self, psi: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(2 * self.dim);
        for k in 0..self.dim - 1 {
            let s = ((k + 1) as f64).sqrt();
            for sp in 0..2 {
                out[2 * (k + 1) + sp] = s * psi[2 * k + sp];
            }
        }
        out
    }

    pub fn apply_spin(&self, m: &Matrix2<f64>, psi: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(2 * self.dim);
        for k in 0..self.dim {
            for i in 0..2 {
                out[2 * k + i] = m[(i, 0)] * psi[2 * k] + m[(i, 1)] * psi[2 * k + 1];
            }
        }
        out
    }

    /// `<bra|a|ket>`
    pub fn overlap(&self, bra: EigenLabel, ket: EigenLabel) -> f64 {
        self.state(bra).dot(&self.apply_a(&self.state(ket)))
    }

    /// Residual of `(tau_+ a + tau_- a^dag - lambda) |n,s>` on the Fock levels
    /// below `keep`, with `tau` scaled by `1/u` and `lambda = s sqrt(n) |chi_R^T tau_- chi_L|`.
    pub fn eigen_residual(&self, label: EigenLabel, keep: usize) -> f64 {
        let psi = self.state(label);
        let tm = self.tau_minus;
        let tp = tm.transpose();
        let chi_r = nalgebra::Vector2::new(self.chi_r[0], self.chi_r[1]);
        let chi_l = nalgebra::Vector2::new(self.chi_l[0], self.chi_l[1]);
        let lambda = label.nu() * chi_r.dot(&(tm * chi_l)).abs();
        let lhs = self.apply_spin(&tp, &self.apply_a(&psi)) + self.apply_spin(&tm, &self.apply_a_dag(&psi)) - &psi * lambda;
        lhs.rows(0, 2 * keep).amax()
    }
}

/// Null direction of `m` from its SVD, normalised to unit sum.
pub fn svd_nullvector(m: &DMatrix<f64>) -> DVector<f64> {
    let svd = m.clone().svd(false, true);
    let (k, _) = svd.singular_values.argmin();
    let v = svd.v_t.unwrap().row(k).transpose();
    let s = v.sum();
    v / s
}
