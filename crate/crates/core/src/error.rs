use thiserror::Error;

/// Failures reported by the evaluators, quadratures and solvers.
///
/// Numeric payloads are stored as `f64` regardless of the scalar type so the
/// error stays `'static` and printable.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point lies on the edge r = 0, where the orthonormal coframe degenerates")]
    OnEdge,
    #[error("point coincides with the pole of the potential")]
    AtPole,
    #[error("point is the origin")]
    AtOrigin,
    #[error("r^c e^(i theta) = {re} + {im}i lies on the cut [1, inf) of the chart")]
    CutViolation { re: f64, im: f64 },
    #[error("quadrature did not reach tolerance {tolerance:e}: error estimate {estimate:e}")]
    Quadrature { estimate: f64, tolerance: f64 },
    #[error("no sign change found within |x| <= {limit}")]
    BracketNotFound { limit: f64 },
    #[error("iteration did not converge: {0}")]
    NonConvergent(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
