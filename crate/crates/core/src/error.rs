use thiserror::Error;

/// Errors raised at operation boundaries (bad inputs, oversized instances).
///
/// Construction procedures that can legitimately come up empty report their
/// own structured failure types instead (see `gadgets::BuildFailure`).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("vertex {vertex} is not in a graph of order {order}")]
    InvalidVertex { vertex: usize, order: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("instance too large for exhaustive search: {size} exceeds cap {cap}")]
    TooLarge { size: usize, cap: usize },
    #[error("average degree {actual} is below the required {required}")]
    DensityTooLow { actual: String, required: String },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
