use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("point {index} ({label}) lies inside the obstacle set")]
    PointInObstacle { index: usize, label: String },

    #[error("graph is disconnected: vertex {0} is unreachable")]
    Disconnected(String),

    #[error("nonpositive or non-finite weight {value} at point {index}")]
    Weight { index: usize, value: f64 },

    #[error("index {index} out of range for a space of {n} points")]
    Index { index: usize, n: usize },

    #[error("distance evaluation returned {value} at {witness:?}")]
    Evaluation { value: f64, witness: Vec<usize> },

    #[error("{0} has no comparison functional")]
    UnsupportedFamily(String),

    #[error("all {0} probes were rejected")]
    Probe(usize),

    #[error("invalid space spec: {0}")]
    Spec(String),
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
