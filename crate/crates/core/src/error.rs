use thiserror::Error;

/// Errors surfaced by graph construction, parsing, and the cut pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: malformed edge line {text:?} (expected \"u v w\")")]
    MalformedLine { line: usize, text: String },
    #[error("line {line}: non-positive weight {weight}")]
    NonPositiveWeight { line: usize, weight: i64 },
    #[error("graph has fewer than 2 vertices")]
    TooFewVertices,
    #[error("total edge weight {total} exceeds the supported maximum {max}")]
    WeightOverflow { total: i128, max: i64 },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("leaf index {index} out of range for list of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("unknown vertex {vertex} (tree has {len} vertices)")]
    UnknownVertex { vertex: usize, len: usize },
    #[error("cut side must be a nonempty proper subset of the vertices")]
    ImproperSide,
    #[error("empty weight list")]
    EmptyList,
    #[error("invalid tree edge pair: {reason}")]
    InvalidEdgePair { reason: String },
    #[error("invalid parent array: {reason}")]
    InvalidTree { reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
