use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A Verblunsky coefficient outside the open unit disk.
    #[error("coefficient at index {index} has modulus {modulus} (must be < 1)")]
    InvalidCoefficient { index: usize, modulus: f64 },

    #[error("polynomials {first} and {second} are not coprime (gcd has degree {gcd_degree})")]
    CoprimalityViolation {
        first: usize,
        second: usize,
        gcd_degree: usize,
    },

    #[error("quadrature did not reach tolerance {tolerance:e} with {nodes} nodes (last change {achieved:e})")]
    Accuracy {
        tolerance: f64,
        achieved: f64,
        nodes: usize,
    },

    #[error("no boundary convention reproduces the quadrature value: {0}")]
    ReconciliationFailure(String),

    #[error("scenario `{scenario}` failed: {details}")]
    ScenarioFailure { scenario: String, details: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures caused by a numerical check rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Accuracy { .. }
                | Error::ReconciliationFailure(_)
                | Error::ScenarioFailure { .. }
        )
    }
}
