use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("tuples must have positive arity")]
    ZeroArity,

    #[error("arity mismatch: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },

    #[error("map must be idempotent")]
    NotIdempotent,

    #[error("map value {value} out of range for arity {arity}")]
    MapValueOutOfRange { value: usize, arity: usize },

    #[error("code index does not fit in a machine word")]
    IndexTooLarge,

    #[error("bit vector at index {index} has length {got}, arity is {want}")]
    BlockLength { index: u64, got: usize, want: usize },
}
