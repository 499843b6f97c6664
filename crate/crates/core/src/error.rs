use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    /// The steady-state amplitude denominator vanishes: the OPA sits at threshold.
    #[error("amplitude denominator is singular (|denominator| = {magnitude:e}); the OPA is at threshold")]
    Threshold { magnitude: f64 },

    #[error("mechanical fixed point did not converge after {iterations} iterations (last relative change {last_change:e})")]
    FixedPointNonConvergence { iterations: usize, last_change: f64 },

    #[error("eigenvalue iteration did not converge")]
    EigenNonConvergence,

    #[error("drift matrix is not stable (spectral abscissa {abscissa:e})")]
    Unstable { abscissa: f64 },

    #[error("linear system is numerically singular")]
    Singular,

    #[error("unphysical covariance matrix: {0}")]
    Unphysical(String),

    #[error("no stable point in gain bracket [{lo:e}, {hi:e}]")]
    NoStablePoint { lo: f64, hi: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}
