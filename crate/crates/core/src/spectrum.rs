//! Drive parameters and the exact spectrum of the resonantly driven
//! Jaynes-Cummings Hamiltonian below threshold, in units where g = 1.

use crate::error::{Error, Result};
use serde::Serialize;

/// Dimensionless drive `eps = 2E/g` together with the derived squeezing data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriveParams {
    pub epsilon: f64,
    /// Squeeze parameter `eta = -ln(1 - eps^2) / 4`.
    pub eta: f64,
    /// `cosh eta`
    pub u: f64,
    /// `sinh eta`
    pub v: f64,
    /// Asymmetry parameter `p = 2 exp(-2 eta) = 2 sqrt(1 - eps^2)`.
    pub p: f64,
}

impl DriveParams {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::ThresholdViolation { epsilon });
        }
        let gap = 1.0 - epsilon * epsilon;
        let eta = -0.25 * gap.ln();
        Ok(DriveParams { epsilon, eta, u: eta.cosh(), v: eta.sinh(), p: 2.0 * gap.sqrt() })
    }

    /// Drive whose asymmetry parameter equals `p`, for `0 < p <= 2`.
    pub fn from_asymmetry(p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 2.0) {
            return Err(Error::InvalidArgument(format!("asymmetry p = {p} outside (0, 2]")));
        }
        let gap = (0.5 * p).powi(2);
        Self::new((1.0 - gap).max(0.0).sqrt())
    }

    /// `1 - eps^2`, the distance to the critical point.
    pub fn gap(&self) -> f64 {
        1.0 - self.epsilon * self.epsilon
    }

    /// Level-spacing scale `(1 - eps^2)^(3/4) = exp(-3 eta)`.
    pub fn spacing_scale(&self) -> f64 {
        self.gap().powf(0.75)
    }
}

pub fn make_drive_params(epsilon: f64) -> Result<DriveParams> {
    DriveParams::new(epsilon)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        }
    }

    pub fn from_sign(s: i32) -> Result<Self> {
        match s {
            1 => Ok(Branch::Plus),
            -1 => Ok(Branch::Minus),
            _ => Err(Error::InvalidArgument(format!("branch sign must be +1 or -1, got {s}"))),
        }
    }
}

/// Signed dressed quantum number `nu = s sqrt(n)`.
///
/// The vacuum `n = 0` has no branch; it is always stored with `Branch::Plus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EigenLabel {
    n: u32,
    branch: Branch,
}

impl EigenLabel {
    pub const VACUUM: EigenLabel = EigenLabel { n: 0, branch: Branch::Plus };

    pub fn new(n: u32, branch: Branch) -> Self {
        if n == 0 {
            Self::VACUUM
        } else {
            EigenLabel { n, branch }
        }
    }

    pub fn plus(n: u32) -> Self {
        Self::new(n, Branch::Plus)
    }

    pub fn minus(n: u32) -> Self {
        Self::new(n, Branch::Minus)
    }

    pub fn n(self) -> u32 {
        self.n
    }

    pub fn branch(self) -> Branch {
        self.branch
    }

    pub fn is_vacuum(self) -> bool {
        self.n == 0
    }

    /// `s sqrt(n)`
    pub fn nu(self) -> f64 {
        self.branch.sign() * (self.n as f64).sqrt()
    }

    /// The image under the particle-hole symmetry, `nu -> -nu`.
    pub fn conjugate(self) -> Self {
        Self::new(self.n, self.branch.flip())
    }

    /// All labels with `n <= n_max`, vacuum first, then `(n, +), (n, -)`.
    pub fn all_up_to(n_max: u32) -> Vec<Self> {
        let mut out = vec![Self::VACUUM];
        for n in 1..=n_max {
            out.push(Self::plus(n));
            out.push(Self::minus(n));
        }
        out
    }
}

/// Eigenvalue `s sqrt(n) (1 - eps^2)^(3/4)` of the rotating-frame Hamiltonian.
pub fn eigenvalue(label: EigenLabel, params: &DriveParams) -> f64 {
    label.nu() * params.spacing_scale()
}

/// Displacement `alpha_nu = -eps s sqrt(n)` of the ladder state.
pub fn displacement(label: EigenLabel, params: &DriveParams) -> f64 {
    -params.epsilon * label.nu()
}

/// Smallest level spacing up to `n_max` measured against the cavity decay rate:
/// `(1 - eps^2)^(3/4) / (2 sqrt(n_max) kappa)`. Values much larger than one
/// mean the populations decouple from the coherences.
pub fn level_spacing_figure_of_merit(params: &DriveParams, kappa: f64, n_max: u32) -> Result<f64> {
    if !(kappa > 0.0) {
        return Err(Error::InvalidArgument(format!("kappa must be positive, got {kappa}")));
    }
    if n_max < 1 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    Ok(params.spacing_scale() / (2.0 * (n_max as f64).sqrt() * kappa))
}
