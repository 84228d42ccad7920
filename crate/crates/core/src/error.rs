use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A caller-supplied value violates a domain constraint.
    #[error("invalid `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    /// The Fock expansion could not reach the requested tail within the cutoff.
    #[error("truncation tail {achieved:e} exceeds tolerance {tolerance:e} at cutoff {cutoff}")]
    TruncationTail {
        achieved: f64,
        tolerance: f64,
        cutoff: usize,
    },

    /// Cancellation between terms would leave less accuracy than requested.
    #[error("cancellation: estimated rounding error {estimated:e} exceeds tolerance {tolerance:e}")]
    PrecisionLoss { estimated: f64, tolerance: f64 },

    #[error("matrix exponential failed: {0}")]
    MatrixExpNonConvergence(String),

    #[error("quadrature changed by {change:e} under point doubling (tolerance {tolerance:e})")]
    QuadratureNonConvergence { change: f64, tolerance: f64 },

    /// The sigma parameterisation of the closed form is singular at this zeta.
    #[error("sigma parameterisation is singular at |zeta| = {0:e}")]
    SigmaSingular(f64),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        !matches!(self, Error::InvalidParameter { .. })
    }
}
