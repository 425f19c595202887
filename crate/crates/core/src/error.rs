use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A hypothesis of an estimate or a regime condition does not hold.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("overflow evaluating nonlinearity at node {node} (lambda*u^2 = {exponent:.3}){context}")]
    Overflow {
        node: usize,
        exponent: f64,
        context: String,
    },

    #[error("non-finite sample at node {node} (x = {coords:?})")]
    NonFinite { node: usize, coords: Vec<f64> },

    #[error("quadrature did not converge: estimated error {estimate:.3e} > target {target:.3e}")]
    Quadrature { estimate: f64, target: f64 },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("grid mismatch: {0}")]
    SpecMismatch(String),

    #[error("boundary leak: boundary max {boundary:.3e} exceeds {tolerance:.1e} of sup norm {sup:.3e}")]
    BoundaryLeak {
        boundary: f64,
        sup: f64,
        tolerance: f64,
    },

    #[error("invalid data: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Hypothesis and regime violations map to a distinct exit status in the CLI.
    pub fn is_hypothesis_violation(&self) -> bool {
        matches!(self, Error::Hypothesis(_) | Error::Domain(_))
    }
}
