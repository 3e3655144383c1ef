use thiserror::Error;

/// Errors surfaced by divergence evaluation, centroid solving, and clustering.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter point lies outside the domain a generator or family requires.
    #[error("{point} is outside the domain of {generator}: {reason}")]
    Domain {
        generator: String,
        point: String,
        reason: String,
    },

    /// Skew factor outside the open interval (0,1).
    #[error("skew factor must lie strictly inside (0,1), got {alpha}")]
    Skew { alpha: f64 },

    /// Scaled skew divergence is undefined at alpha in {0,1}.
    #[error("scaled skew divergence is undefined at alpha = {alpha}")]
    Scale { alpha: f64 },

    /// Weight vector violates positivity/normalization requirements.
    #[error("invalid weights: {0}")]
    Weight(String),

    /// A gradient or its inverse produced a non-finite value.
    #[error("non-finite value while {0}")]
    NonFinite(String),

    /// A symmetric linear system could not be factorized (pivot below threshold).
    #[error("singular linear system: {0}")]
    SingularSystem(String),

    /// An iterate that must be positive definite is not.
    #[error("matrix is not positive definite: {0}")]
    NotPd(String),

    /// Vector/matrix dimensions do not agree.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A divergence evaluated more negative than round-off can explain.
    #[error("internal consistency violation: {0}")]
    Internal(String),

    /// A cluster ended up with too few points to fit a component.
    #[error("degenerate cluster: {0}")]
    DegenerateCluster(String),

    /// An empty cluster could not be repaired by reassignment.
    #[error("empty cluster: {0}")]
    EmptyCluster(String),

    /// Malformed input (JSON payloads, image files, CSV).
    #[error("parse error: {0}")]
    Parse(String),

    /// I/O failure reading or writing an external file.
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Relabel which argument a domain error refers to ("p", "q", "midpoint", ...).
    pub(crate) fn for_point(self, label: &str) -> Self {
        match self {
            Error::Domain {
                generator, reason, ..
            } => Error::Domain {
                generator,
                point: label.to_string(),
                reason,
            },
            other => other,
        }
    }
}
