use thiserror::Error;

/// Errors raised by the exact-arithmetic core.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoreError {
    #[error("tuple arity must be positive")]
    ZeroArity,
    #[error("tuple component exceeds the machine word range")]
    ComponentTooLarge,
    #[error("window [{a}, {b}] invalid for prefix length {len}")]
    BadWindow { a: usize, b: usize, len: usize },
    #[error("slot {0} is undefined")]
    UndefinedSlot(u64),
    #[error("interval [{lo}, {hi}) not contained in the sequence domain [0, {len})")]
    IntervalOutOfRange { lo: u64, hi: u64, len: u64 },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("invalid bit character {0:?}")]
    BadBitChar(char),
}
