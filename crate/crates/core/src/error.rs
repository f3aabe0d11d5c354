use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The drive sits at or above the critical point `eps^2 = 1`, or below zero.
    #[error("drive eps = {epsilon} outside [0, 1): the driven spectrum is continuous at and above threshold")]
    ThresholdViolation { epsilon: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate denominator A_nm + A_mn = {value:e} for (n, m) = ({n}, {m})")]
    DegenerateDenominator { n: usize, m: usize, value: f64 },

    #[error("negative off-diagonal rate {value:e} at ({row}, {col})")]
    NegativeRate { row: usize, col: usize, value: f64 },

    #[error("zero rate on cycle edge {from} -> {to}")]
    ZeroRateEdge { from: usize, to: usize },

    #[error("rate matrix has a degenerate (multi-dimensional) nullspace")]
    DegenerateNullspace,

    #[error("steady-state solve did not converge: residual {residual:e} exceeds bound {bound:e}")]
    NonConvergence { residual: f64, bound: f64 },

    #[error("population rho({index}) = {value:e} is negative beyond round-off")]
    NegativePopulation { index: usize, value: f64 },

    #[error("non-positive population rho({index}) = {value:e} inside fit window")]
    NonPositiveWindow { index: usize, value: f64 },

    #[error("insufficient data for fit: {0}")]
    InsufficientData(String),

    #[error("distribution p = {dist_p} does not match drive p = {drive_p}")]
    ParameterMismatch { dist_p: f64, drive_p: f64 },

    #[error("Bloch length drift {drift:e} exceeds 1e-6; reduce the step size")]
    StepSizeFailure { drift: f64 },

    #[error("closed-form and numerical stability spectra disagree by {mismatch:e}")]
    EigenvalueMismatch { mismatch: f64 },

    #[error("ordered mean-field fixed points need kappa > 0 (the photon field diverges as kappa -> 0)")]
    OrderedWithoutDamping,
}
