//! Steady-state expectation values and the critical exponents near `eps = 1`.
//!
//! A [`Distribution`] holds the vacuum population at index 0 and, for
//! `n >= 1`, the total population of the pair `(n, +), (n, -)`, split evenly
//! between the two branches.

use crate::error::{Error, Result};
use crate::fit::{power_law_fit, LinearFit};
use crate::matel::eigenstate_expectations;
use crate::spectrum::{DriveParams, EigenLabel};
use crate::steady::{mean_quantum_number, Distribution};
use num_complex::Complex64;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteadyObservables {
    pub a_mean: Complex64,
    pub n_phot: f64,
    pub sigma: [f64; 3],
    pub bloch_len_sq: f64,
    pub rho0: f64,
}

impl SteadyObservables {
    /// `<sigma_-> = (sigma_x - i sigma_y) / 2`.
    pub fn sigma_minus(&self) -> Complex64 {
        Complex64::new(0.5 * self.sigma[0], -0.5 * self.sigma[1])
    }
}

pub fn steady_observables(dist: &Distribution, params: &DriveParams) -> Result<SteadyObservables> {
    if (dist.p - params.p).abs() > 1e-9 {
        return Err(Error::ParameterMismatch { dist_p: dist.p, drive_p: params.p });
    }
    let rho0 = dist.rho[0];
    let vac = eigenstate_expectations(EigenLabel::VACUUM, params);
    let mut a = rho0 * vac.a;
    let mut n_phot = rho0 * vac.n_phot;
    let mut sigma = vac.sigma.map(|x| rho0 * x);
    for (n, &pop) in dist.rho.iter().enumerate().skip(1) {
        let half = 0.5 * pop;
        let up = eigenstate_expectations(EigenLabel::plus(n as u32), params);
        let dn = eigenstate_expectations(EigenLabel::minus(n as u32), params);
        a += half * up.a + half * dn.a;
        n_phot += half * up.n_phot + half * dn.n_phot;
        for k in 0..3 {
            sigma[k] += half * up.sigma[k] + half * dn.sigma[k];
        }
    }
    let bloch_len_sq = sigma.iter().map(|x| x * x).sum();
    Ok(SteadyObservables { a_mean: Complex64::new(a, 0.0), n_phot, sigma, bloch_len_sq, rho0 })
}

/// `|E + g <sigma_-> + i kappa <a>|` at `kappa -> 0` with `g = 1`, `E = eps/2`.
pub fn ward_residual(obs: &SteadyObservables, params: &DriveParams) -> f64 {
    (Complex64::new(0.5 * params.epsilon, 0.0) + obs.sigma_minus()).norm()
}

/// One point of a drive sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObservablePoint {
    pub epsilon: f64,
    pub nbar: f64,
    pub obs: SteadyObservables,
}

impl ObservablePoint {
    pub fn new(dist: &Distribution, params: &DriveParams) -> Result<Self> {
        Ok(ObservablePoint { epsilon: params.epsilon, nbar: mean_quantum_number(dist), obs: steady_observables(dist, params)? })
    }

    pub fn gap(&self) -> f64 {
        1.0 - self.epsilon * self.epsilon
    }
}

/// Log-log fits against `1 - eps^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalExponents {
    /// `<a^dag a>`
    pub flux: LinearFit,
    /// `|<sigma_z>|`
    pub sigma_z: LinearFit,
    /// `1 - |<sigma>|^2`
    pub bloch_defect: LinearFit,
    /// Distribution width `nbar`.
    pub width: LinearFit,
    /// Photons per unit of dressed quantum number, `<a^dag a> / nbar`.
    pub per_state: LinearFit,
}

pub fn fit_critical_exponents(points: &[ObservablePoint]) -> Result<CriticalExponents> {
    if points.len() < 6 {
        return Err(Error::InsufficientData(format!("{} sweep points, need at least 6", points.len())));
    }
    let gaps: Vec<f64> = points.iter().map(ObservablePoint::gap).collect();
    let (lo, hi) = gaps.iter().fold((f64::INFINITY, 0.0_f64), |(a, b), &g| (a.min(g), b.max(g)));
    if !(hi >= 10.0 * lo) {
        return Err(Error::InsufficientData(format!("1 - eps^2 spans [{lo:e}, {hi:e}], less than a decade")));
    }
    let col = |f: &dyn Fn(&ObservablePoint) -> f64| -> Vec<f64> { points.iter().map(f).collect() };
    Ok(CriticalExponents {
        flux: power_law_fit(&gaps, &col(&|p| p.obs.n_phot))?,
        sigma_z: power_law_fit(&gaps, &col(&|p| p.obs.sigma[2].abs()))?,
        bloch_defect: power_law_fit(&gaps, &col(&|p| 1.0 - p.obs.bloch_len_sq))?,
        width: power_law_fit(&gaps, &col(&|p| p.nbar))?,
        per_state: power_law_fit(&gaps, &col(&|p| p.obs.n_phot / p.nbar))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::steady::SolverKind;

    fn dist(rho: Vec<f64>, p: f64) -> Distribution {
        Distribution { n_max: rho.len(), rho, p, provenance: "custom".into(), residual: 0.0, solver: SolverKind::Bordered }
    }

    #[test]
    fn undriven_limit() {
        let d = DriveParams::new(0.0).unwrap();
        let o = steady_observables(&dist(vec![0.7, 0.2, 0.1], 2.0), &d).unwrap();
        assert_eq!(o.a_mean, Complex64::new(0.0, 0.0));
        assert_eq!(o.sigma, [0.0, 0.0, -0.7]);
        // bare |n,+-> carry n - 1/2 photons
        assert!((o.n_phot - (0.2 * 0.5 + 0.1 * 1.5)).abs() < 1e-15);
    }

    #[test]
    fn exact_identities() {
        let d = DriveParams::new(0.95).unwrap();
        let o = steady_observables(&dist(vec![0.4, 0.3, 0.2, 0.1], d.p), &d).unwrap();
        assert_eq!(o.a_mean.re, 0.0);
        assert_eq!(o.sigma[1], 0.0);
        assert!((o.sigma[0] + 0.95).abs() < 1e-15);
        assert!((o.sigma[2] + 0.4 * d.gap().sqrt()).abs() < 1e-15);
        assert!((o.sigma_minus().re + 0.475).abs() < 1e-15);
        assert!(ward_residual(&o, &d) < 1e-15);
        assert!(o.bloch_len_sq <= 1.0);
    }

    #[test]
    fn photon_number_matches_closed_sum() {
        let d = DriveParams::new(0.9).unwrap();
        let rho = vec![0.25, 0.25, 0.25, 0.25];
        let o = steady_observables(&dist(rho.clone(), d.p), &d).unwrap();
        let c = 2.0 * 0.81 * (2.0 * d.eta).exp() + (2.0 * d.eta).cosh();
        let weighted: f64 = rho.iter().enumerate().map(|(n, r)| r * c * n as f64).sum();
        let expected = weighted - 0.5 + rho[0] * (d.v * d.v + 0.5);
        assert!((o.n_phot - expected).abs() < 1e-13);
    }

    #[test]
    fn mismatched_p_is_rejected() {
        let d = DriveParams::new(0.5).unwrap();
        assert!(matches!(steady_observables(&dist(vec![1.0, 0.0], 0.3), &d), Err(Error::ParameterMismatch { .. })));
    }

    #[test]
    fn exponent_fit_needs_range() {
        let d = DriveParams::new(0.99).unwrap();
        let o = steady_observables(&dist(vec![0.5, 0.5], d.p), &d).unwrap();
        let pt = |eps: f64| ObservablePoint { epsilon: eps, nbar: 1.0, obs: o };
        let narrow: Vec<_> = (0..6).map(|k| pt(0.95 + 0.001 * k as f64)).collect();
        assert!(fit_critical_exponents(&narrow).is_err());
        assert!(fit_critical_exponents(&narrow[..3]).is_err());
    }

    #[test]
    fn exponents_of_synthetic_scaling() {
        // rho0 = 1/2 and nbar = gap^{-1/2} built by hand
        let points: Vec<ObservablePoint> = (0..8)
            .map(|k| {
                let gap = 10f64.powf(-1.0 - 2.0 * k as f64 / 7.0);
                let eps = (1.0 - gap).sqrt();
                let d = DriveParams::new(eps).unwrap();
                let mut o = steady_observables(&dist(vec![0.5, 0.5], d.p), &d).unwrap();
                let nbar = gap.powf(-0.5);
                o.n_phot = 3.0 * nbar * gap.powf(-0.5);
                ObservablePoint { epsilon: eps, nbar, obs: o }
            })
            .collect();
        let e = fit_critical_exponents(&points).unwrap();
        assert!((e.flux.slope + 1.0).abs() < 1e-10);
        assert!((e.width.slope + 0.5).abs() < 1e-10);
        assert!((e.per_state.slope + 0.5).abs() < 1e-10);
        assert!((e.sigma_z.slope - 0.5).abs() < 1e-10);
        assert!((e.bloch_defect.slope - 1.0).abs() < 1e-10);
    }
}
