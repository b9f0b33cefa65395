use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("height {q} is below the minimal moving height {e} of the Hirzebruch model")]
    HeightBelowModel { q: i64, e: i64 },

    #[error("height {q} and twist {e} have different parity, the fiber coefficient is not integral")]
    NonIntegralCoefficient { q: i64, e: i64 },

    /// The bounded search for a free-curve decomposition ran out of candidates.
    #[error("no decomposition into free classes found for {0:?}")]
    DecompositionNotFound(Vec<i64>),

    #[error("element budget of {cap} exceeded")]
    CapExceeded { cap: usize },

    #[error("search exhausted: {0}")]
    NotFound(String),

    #[error("hypothesis not met: {0}")]
    NotApplicable(String),

    /// A combinatorial statement that should always hold was contradicted.
    #[error("invariant violated: {0}")]
    Falsified(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
