use thiserror::Error;

/// Errors raised by the model, solvers and experiments.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Hermite order {order} exceeds the supported maximum {max}")]
    HermiteOrder { order: usize, max: usize },

    #[error("quadrature did not converge (last relative change {last_change:e})")]
    Quadrature { last_change: f64 },

    #[error("eigensolver did not converge (worst residual {worst_residual:e})")]
    NoConvergence { worst_residual: f64 },

    #[error("the Hamiltonian is not anti-PT symmetric (residual {residual:e}); numeric spectra are only supported for the unperturbed chain")]
    UnsupportedHamiltonian { residual: f64 },

    #[error("spectrum mode {index} carries no left eigenvector")]
    MissingLeftVector { index: usize },

    #[error("state `{label}` is not Dirac-normalized (norm^2 = {norm2})")]
    NotNormalized { label: String, norm2: f64 },

    #[error("state has zero norm; fidelity is undefined")]
    ZeroState,

    #[error("step size {dt} violates the stability bound (dt * spectral radius = {product:.3} > {limit})")]
    StepSize { dt: f64, product: f64, limit: f64 },

    #[error("numerical breakdown (non-finite amplitudes) at t = {time}")]
    NumericBreakdown { time: f64 },

    #[error("pulse too soft for a validated switch: hardness ratio {ratio:.3} < {limit}")]
    SoftPulse { ratio: f64, limit: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
