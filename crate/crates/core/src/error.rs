use thiserror::Error;

/// Errors raised by the analytic and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A parameter set violates a structural invariant.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Adaptive quadrature ran out of subdivisions before meeting tolerance.
    #[error("quadrature did not converge after {subdivisions} subdivisions (estimate {estimate:e}, error {error:e})")]
    NonConvergence {
        subdivisions: usize,
        estimate: f64,
        error: f64,
    },

    /// An iterative solver hit its iteration cap.
    #[error("iteration limit of {0} reached without convergence")]
    IterationLimit(usize),

    /// The root-finding bracket does not straddle a sign change.
    #[error("root not bracketed: f({lo}) = {f_lo:e}, f({hi}) = {f_hi:e}")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    /// A linear system is numerically singular.
    #[error("singular linear system (determinant {0:e})")]
    Singular(f64),

    /// The requested load is at or beyond the spectral-efficiency limit.
    #[error("spectral efficiency {c} is beyond the interference limit")]
    LimitExceeded { c: f64 },

    /// The interference fixed point grew past the configured cap.
    #[error("interference iteration diverged (exceeded {cap:e})")]
    Divergence { cap: f64 },
}

impl Error {
    /// True for the numerical failures the CLI reports with exit code 2.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. } | Error::IterationLimit(_) | Error::Bracket { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
