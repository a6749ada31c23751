use thiserror::Error;

/// Errors raised across the library.
///
/// Variants fall into two families: domain errors (a parameter outside the
/// region where a formula or computation is defined) and configuration or
/// I/O errors. [`Error::is_domain`] lets front ends map them to exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("{name} = {value} outside the valid domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: String,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("system of {qubits} qubits exceeds the resource guard of {limit}")]
    TooLarge { qubits: usize, limit: usize },

    #[error("unknown selector {kind} `{value}`")]
    UnknownSelector { kind: &'static str, value: String },

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("state is not a product across the requested bipartition (second Schmidt value {0:e})")]
    NotProduct(f64),

    #[error("iteration did not converge within {max_iter} steps (last step {last_step:e})")]
    NotConverged { max_iter: usize, last_step: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, domain: impl Into<String>) -> Self {
        Error::Domain {
            name,
            value,
            domain: domain.into(),
        }
    }

    /// True for errors caused by parameters outside a formula's domain or a
    /// resource guard, as opposed to malformed configuration or I/O.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. }
                | Error::Precondition(_)
                | Error::TooLarge { .. }
                | Error::NotConverged { .. }
                | Error::InsufficientData(_)
                | Error::NotNormalized(_)
                | Error::NotProduct(_)
                | Error::DimensionMismatch { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
