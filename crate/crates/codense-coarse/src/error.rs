use codense_codec::CodecError;
use codense_core::CoreError;
use codense_layout::LayoutError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoarseError {
    /// The source sequence has a hole inside an interval a row reads.
    #[error("row {row} reads the width-2^{n} interval, undefined at {x}")]
    UndefinedInterval { row: usize, n: u32, x: u64 },
    /// No fully empty code block inside the covered rows, so decoding cannot
    /// tell where the support stops.
    #[error("insufficient rows for column {n}: {coverage} available, no empty block found")]
    InsufficientRows { n: u32, coverage: u64 },
    /// The row's repetition count does not fit in memory, so its interval
    /// content cannot be written out bit by bit.
    #[error("row {row} cannot be materialized")]
    RowNotMaterializable { row: usize },
    /// A perturbation site lies outside the source sequence's domain.
    #[error("perturbation site {0} is undefined in the source")]
    PerturbSiteUndefined(u64),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Codec(#[from] CodecError),
}
