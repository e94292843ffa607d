use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A channel or region description is missing entries or has the wrong shape.
    #[error("malformed input: {0}")]
    Structural(String),

    /// A value is outside the domain of the operation (bad symbol, dimension mismatch).
    #[error("domain error: {0}")]
    Domain(String),

    /// The caller broke an operation's precondition.
    #[error("precondition violated: {0}")]
    Contract(String),

    #[error("inequality system is infeasible")]
    Infeasible,

    #[error("region is unbounded in direction {0}")]
    Unbounded(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("enumeration exceeded the facet cap of {cap}")]
    FacetOverflow { cap: usize },

    /// Something that the underlying theory guarantees did not happen.
    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
