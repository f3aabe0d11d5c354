//! Semiclassical equations for the photon field `<a> = a1 + i a2` and the
//! Bloch components `<sigma_-> = s1 + i s2`, `<sigma_z> = s3`.
//!
//! Unlike the rest of the crate, `g` and `kappa` are explicit here.

use crate::error::{Error, Result};
use nalgebra::{Matrix5, Vector5};
use num_complex::Complex64;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct MeanFieldState {
    pub a1: f64,
    pub a2: f64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

impl MeanFieldState {
    pub fn to_vector(self) -> Vector5<f64> {
        Vector5::new(self.a1, self.a2, self.s1, self.s2, self.s3)
    }

    pub fn from_vector(v: &Vector5<f64>) -> Self {
        MeanFieldState { a1: v[0], a2: v[1], s1: v[2], s2: v[3], s3: v[4] }
    }

    /// `4 s1^2 + 4 s2^2 + s3^2`, the squared Bloch length.
    pub fn ell_sq(&self) -> f64 {
        4.0 * self.s1 * self.s1 + 4.0 * self.s2 * self.s2 + self.s3 * self.s3
    }

    pub fn a(&self) -> Complex64 {
        Complex64::new(self.a1, self.a2)
    }

    /// `(sigma_x, sigma_y, sigma_z) = (2 s1, -2 s2, s3)`.
    pub fn sigma(&self) -> [f64; 3] {
        [2.0 * self.s1, -2.0 * self.s2, self.s3]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanFieldParams {
    pub epsilon: f64,
    pub kappa: f64,
    pub g: f64,
}

impl MeanFieldParams {
    pub fn new(epsilon: f64, kappa: f64, g: f64) -> Result<Self> {
        if !(g > 0.0) {
            return Err(Error::InvalidArgument(format!("g must be positive, got {g}")));
        }
        if !(kappa >= 0.0) {
            return Err(Error::InvalidArgument(format!("kappa must be non-negative, got {kappa}")));
        }
        if !epsilon.is_finite() {
            return Err(Error::InvalidArgument("epsilon must be finite".into()));
        }
        Ok(MeanFieldParams { epsilon, kappa, g })
    }

    /// Drive amplitude `E = g eps / 2`.
    pub fn drive(&self) -> f64 {
        0.5 * self.g * self.epsilon
    }
}

pub fn rhs(x: &MeanFieldState, prm: &MeanFieldParams) -> MeanFieldState {
    let (g, k) = (prm.g, prm.kappa);
    MeanFieldState {
        a1: -k * x.a1 + g * x.s2,
        a2: -k * x.a2 - prm.drive() - g * x.s1,
        s1: -g * x.a2 * x.s3,
        s2: g * x.a1 * x.s3,
        s3: 4.0 * g * (x.a2 * x.s1 - x.a1 * x.s2),
    }
}

pub fn jacobian(x: &MeanFieldState, prm: &MeanFieldParams) -> Matrix5<f64> {
    let (g, k) = (prm.g, prm.kappa);
    #[rustfmt::skip]
    let j = Matrix5::new(
        -k, 0.0, 0.0, g, 0.0,
        0.0, -k, -g, 0.0, 0.0,
        0.0, -g * x.s3, 0.0, 0.0, -g * x.a2,
        g * x.s3, 0.0, 0.0, 0.0, g * x.a1,
        -4.0 * g * x.s2, 4.0 * g * x.s1, 4.0 * g * x.a2, -4.0 * g * x.a1, 0.0,
    );
    j
}

/// Central differences of [`rhs`] with step `h`.
pub fn finite_difference_jacobian(x: &MeanFieldState, prm: &MeanFieldParams, h: f64) -> Matrix5<f64> {
    let base = x.to_vector();
    let mut j = Matrix5::zeros();
    for c in 0..5 {
        let mut up = base;
        let mut dn = base;
        up[c] += h;
        dn[c] -= h;
        let f_up = rhs(&MeanFieldState::from_vector(&up), prm).to_vector();
        let f_dn = rhs(&MeanFieldState::from_vector(&dn), prm).to_vector();
        j.set_column(c, &((f_up - f_dn) / (2.0 * h)));
    }
    j
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<MeanFieldState>,
    /// Largest `|ell^2(t) - ell^2(0)|` along the run.
    pub max_drift: f64,
}

pub const MAX_ELL_DRIFT: f64 = 1e-6;

/// Classical fixed-step RK4, sampled every step.
pub fn integrate(x0: MeanFieldState, prm: &MeanFieldParams, t_final: f64, dt: f64) -> Result<Trajectory> {
    if !(dt > 0.0) || !(t_final >= dt) {
        return Err(Error::InvalidArgument(format!("need 0 < dt <= t_final, got dt = {dt}, t_final = {t_final}")));
    }
    let steps = (t_final / dt).round() as usize;
    let f = |v: &Vector5<f64>| rhs(&MeanFieldState::from_vector(v), prm).to_vector();
    let ell0 = x0.ell_sq();
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push(x0);
    let mut y = x0.to_vector();
    let mut max_drift = 0.0_f64;
    for i in 1..=steps {
        let k1 = f(&y);
        let k2 = f(&(y + k1 * (0.5 * dt)));
        let k3 = f(&(y + k2 * (0.5 * dt)));
        let k4 = f(&(y + k3 * dt));
        y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        let s = MeanFieldState::from_vector(&y);
        let drift = (s.ell_sq() - ell0).abs();
        max_drift = max_drift.max(drift);
        if !(drift <= MAX_ELL_DRIFT) {
            return Err(Error::StepSizeFailure { drift });
        }
        times.push(i as f64 * dt);
        states.push(s);
    }
    Ok(Trajectory { times, states, max_drift })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Unstable,
    /// No eigenvalue with positive real part, and some with zero real part
    /// beyond the conserved Bloch length.
    NeutrallyStable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedPointKind {
    /// `<sigma_z> = -sqrt(l^2 - eps^2)`
    DisorderedLower,
    /// `<sigma_z> = +sqrt(l^2 - eps^2)`
    DisorderedUpper,
    /// Upper sign in the ordered solution, `Re <a> < 0`.
    OrderedMinus,
    /// Lower sign in the ordered solution, `Re <a> > 0`.
    OrderedPlus,
}

impl FixedPointKind {
    pub fn is_ordered(self) -> bool {
        matches!(self, FixedPointKind::OrderedMinus | FixedPointKind::OrderedPlus)
    }

    /// Linear stability assigned by the semiclassical analysis.
    pub fn expected_stability(self) -> Stability {
        match self {
            FixedPointKind::DisorderedLower => Stability::Stable,
            FixedPointKind::DisorderedUpper => Stability::Unstable,
            _ => Stability::NeutrallyStable,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedPoint {
    pub kind: FixedPointKind,
    pub state: MeanFieldState,
}

/// Stationary solutions on the Bloch shell of length `ell`.
///
/// Below `eps^2 = ell^2` the two disordered points; above it the two ordered
/// ones, which require `kappa > 0`. At `eps^2 = ell^2` both disordered points
/// sit at `s3 = 0` and coincide with the ordered pair.
pub fn fixed_points(epsilon: f64, ell: f64, kappa: f64, g: f64) -> Result<Vec<FixedPoint>> {
    let prm = MeanFieldParams::new(epsilon, kappa, g)?;
    if !(ell > 0.0 && ell <= 1.0) {
        return Err(Error::InvalidArgument(format!("Bloch length must lie in (0, 1], got {ell}")));
    }
    let (e2, l2) = (epsilon * epsilon, ell * ell);
    if e2 <= l2 {
        let s1 = -prm.drive() / g;
        let s3 = (l2 - e2).max(0.0).sqrt();
        let mk = |kind, s3| FixedPoint { kind, state: MeanFieldState { a1: 0.0, a2: 0.0, s1, s2: 0.0, s3 } };
        return Ok(vec![mk(FixedPointKind::DisorderedLower, -s3), mk(FixedPointKind::DisorderedUpper, s3)]);
    }
    if kappa == 0.0 {
        return Err(Error::OrderedWithoutDamping);
    }
    let root = (1.0 - l2 / e2).sqrt();
    let amp = g / (2.0 * kappa) * (e2 - l2).sqrt();
    let mk = |kind, sign: f64| FixedPoint {
        kind,
        state: MeanFieldState {
            a1: -sign * amp * ell / epsilon,
            a2: -amp * root,
            s1: -l2 / (2.0 * epsilon),
            s2: -sign * 0.5 * ell * root,
            s3: 0.0,
        },
    };
    Ok(vec![mk(FixedPointKind::OrderedMinus, 1.0), mk(FixedPointKind::OrderedPlus, -1.0)])
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub closed_form: Vec<Complex64>,
    pub numeric: Vec<Complex64>,
    /// Largest distance between a closed-form eigenvalue and the mean of the
    /// numeric eigenvalues assigned to it.
    pub mismatch: f64,
    pub stability: Stability,
}

/// Eigenvalue tolerance for closed-form vs numeric agreement.
pub const EIGEN_TOL: f64 = 1e-8;
/// Spread allowed inside a numerically split degenerate cluster.
pub const CLUSTER_TOL: f64 = 1e-5;

fn closed_form_spectrum(fp: &FixedPoint, prm: &MeanFieldParams) -> Vec<Complex64> {
    let (g, k) = (prm.g, prm.kappa);
    let zero = Complex64::new(0.0, 0.0);
    if fp.kind.is_ordered() {
        let w = (2.0 * g / k) * Complex64::new(prm.drive() * (prm.drive() + g * fp.state.s1), 0.0).sqrt();
        let i = Complex64::new(0.0, 1.0);
        let mk = Complex64::new(-k, 0.0);
        vec![zero, mk, mk, i * w, -i * w]
    } else {
        let root = Complex64::new(k * k + 4.0 * g * g * fp.state.s3, 0.0).sqrt();
        let hi = 0.5 * (Complex64::new(-k, 0.0) + root);
        let lo = 0.5 * (Complex64::new(-k, 0.0) - root);
        vec![zero, hi, hi, lo, lo]
    }
}

/// Greedy assignment of numeric eigenvalues to closed-form clusters.
fn match_spectra(closed: &[Complex64], numeric: &[Complex64]) -> Result<f64> {
    let scale = closed.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mut used = vec![false; numeric.len()];
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    for &z in closed {
        match clusters.iter_mut().find(|(c, _)| (c - z).norm() <= 1e-12 * scale) {
            Some(c) => c.1 += 1,
            None => clusters.push((z, 1)),
        }
    }
    let mut mismatch = 0.0_f64;
    for (target, count) in clusters {
        let mut picked = Vec::with_capacity(count);
        for _ in 0..count {
            let (best, _) = numeric
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .min_by(|a, b| (a.1 - target).norm().total_cmp(&(b.1 - target).norm()))
                .ok_or(Error::EigenvalueMismatch { mismatch: f64::INFINITY })?;
            used[best] = true;
            picked.push(numeric[best]);
        }
        let mean = picked.iter().sum::<Complex64>() / picked.len() as f64;
        let spread = picked.iter().map(|z| (z - mean).norm()).fold(0.0, f64::max);
        if spread > CLUSTER_TOL * scale {
            return Err(Error::EigenvalueMismatch { mismatch: spread });
        }
        mismatch = mismatch.max((mean - target).norm());
    }
    Ok(mismatch)
}

fn classify(numeric: &[Complex64], scale: f64) -> Stability {
    let tol = 1e-9 * scale;
    // drop the conserved-length mode: the eigenvalue nearest zero
    let skip = numeric
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .map(|(i, _)| i);
    let rest = numeric.iter().enumerate().filter(|(i, _)| Some(*i) != skip).map(|(_, z)| z.re);
    let max_re = rest.fold(f64::NEG_INFINITY, f64::max);
    if max_re > tol {
        Stability::Unstable
    } else if max_re < -tol {
        Stability::Stable
    } else {
        Stability::NeutrallyStable
    }
}

/// Linearised spectrum at `fp`, in closed form and from the 5x5 Jacobian.
pub fn stability_eigenvalues(fp: &FixedPoint, prm: &MeanFieldParams) -> Result<StabilityReport> {
    let closed_form = closed_form_spectrum(fp, prm);
    let numeric: Vec<Complex64> = jacobian(&fp.state, prm).complex_eigenvalues().iter().copied().collect();
    let mismatch = match_spectra(&closed_form, &numeric)?;
    let scale = closed_form.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if !(mismatch <= EIGEN_TOL * scale) {
        return Err(Error::EigenvalueMismatch { mismatch });
    }
    let stability = classify(&numeric, scale);
    Ok(StabilityReport { closed_form, numeric, mismatch, stability })
}
