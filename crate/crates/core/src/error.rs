use thiserror::Error;

/// Errors raised by the numerical core.
///
/// Variants carry plain `f64`/`String` payloads so the type does not depend
/// on the scalar parameter of the routine that produced it.
#[derive(Debug, Error)]
pub enum Error {
    #[error("pole of the function at {re} + {im}i")]
    Pole { re: f64, im: f64 },
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("series failed to converge: {0}")]
    Convergence(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error("line Re z = {re} outside the strip ({lo}, {hi})")]
    Strip { re: f64, lo: f64, hi: f64 },
    #[error("sample {index} is exactly zero and Re z = {re} <= 1")]
    SingularSample { index: usize, re: f64 },
    #[error("unknown catalog tag `{0}`")]
    UnknownCatalogTag(String),
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("tail criterion failed: {0}")]
    Tail(String),
    #[error("branch cut hit: {0}")]
    Branch(String),
    #[error("invalid Levy model: {0}")]
    Model(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("time {value} at index {index} is negative")]
    NegativeTime { index: usize, value: f64 },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("density underflow: {0}")]
    Divide(String),
    #[error("non-finite value produced: {0}")]
    NonFinite(String),
    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Wraps the error with a short description of where it happened.
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
