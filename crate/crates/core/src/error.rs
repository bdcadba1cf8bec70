use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure kinds shared by every module.
///
/// Callers that need to sort failures into "bad input" versus "the numerics
/// gave up" use [`Error::is_precondition`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("graph would have {requested} vertices, cap is {cap}")]
    CapExceeded { requested: u128, cap: usize },

    #[error("vertex {vertex} out of range (graph has {vertex_count} vertices)")]
    VertexOutOfRange { vertex: usize, vertex_count: usize },

    #[error("graph is not connected")]
    Disconnected,

    #[error("edge ({0}, {1}) is invalid: self-loop or duplicate")]
    InvalidEdge(usize, usize),

    #[error(
        "vertex {vertex} needs interior radius {required} but the finite stand-in only provides {available}"
    )]
    ValidityRadius {
        vertex: usize,
        required: usize,
        available: usize,
    },

    #[error("vector has non-zero entry at vertex {vertex}, outside the domain")]
    SupportViolation { vertex: usize },

    #[error("expected a non-negative, non-zero vector")]
    NotPositive,

    #[error("empty domain")]
    EmptyDomain,

    #[error(
        "power iteration did not converge after {iterations} iterations; top eigenvalue of the squared killed operator lies in [{lower}, {upper}]"
    )]
    NonConvergence {
        iterations: usize,
        lower: f64,
        upper: f64,
    },

    #[error("profile mode mismatch: {0}")]
    ModeMismatch(String),

    #[error("graph family {0} is not vertex-transitive")]
    NonTransitive(String),

    #[error("insufficient samples: got {got}, need at least {need}")]
    InsufficientSamples { got: u64, need: u64 },

    #[error("threshold of {required} steps exceeds the configured cap of {cap}")]
    StepCapExceeded { required: u64, cap: u64 },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    /// True when the failure is a violated precondition rather than a
    /// runtime failure of an otherwise valid computation.
    pub fn is_precondition(&self) -> bool {
        !matches!(
            self,
            Error::NonConvergence { .. } | Error::StepCapExceeded { .. } | Error::Parse { .. }
        )
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
