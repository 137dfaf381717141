use crate::error::CoarseError;
use codense_codec::encode_at;
use codense_core::{interval_i, CoreError, PartialSeq};
use codense_layout::{layout_rows, LayoutSchedule, SymbolicSet};

/// The laid-out image of a value sequence, together with the prefix of the
/// source it was read from.
///
/// Row `i` of the image carries the width-`2^{n_i}` code block of the source
/// restricted to `I_{n_i} = [2^{n_i}, 2^{n_i+1})`, evaluated at code index
/// `s_i`, repeated across the row's coding interval. Payload `i` is a pure
/// function of that restriction and `s_i`; nothing else about the source
/// leaks into it.
#[derive(Clone, Debug)]
pub struct GammaImage {
    set: SymbolicSet,
    source: PartialSeq,
}

impl GammaImage {
    pub fn set(&self) -> &SymbolicSet {
        &self.set
    }

    /// The consumed prefix of the source: everything up to the end of the
    /// widest interval any assembled row reads.
    pub fn source(&self) -> &PartialSeq {
        &self.source
    }

    pub fn rows(&self) -> usize {
        self.set.rows().len()
    }
}

/// Codes the first `rows` rows of the schedule from `f`.
///
/// Row `i` reads `f` on `I_{n_i}` only, so `f` must be defined there for
/// every assembled row; holes elsewhere are fine.
pub fn gamma_prefix(
    f: &PartialSeq,
    schedule: &LayoutSchedule,
    rows: usize,
) -> Result<GammaImage, CoarseError> {
    // Validates widths and magnitudes before any interval is read.
    let laid = layout_rows(schedule, rows)?;
    let mut payloads = Vec::with_capacity(rows);
    let mut consumed = 0u64;
    for row in &laid {
        let (lo, hi) = interval_i(row.n);
        let seg = f.slice(lo, hi).map_err(|e| match e {
            CoreError::UndefinedSlot(x) => {
                CoarseError::UndefinedInterval { row: row.index, n: row.n, x }
            }
            _ => CoarseError::UndefinedInterval {
                row: row.index,
                n: row.n,
                x: lo.max(f.len() as u64),
            },
        })?;
        let values = seg.values().expect("slice is total");
        payloads.push(encode_at(&values, row.s as u64)?);
        consumed = consumed.max(hi);
    }
    let set = SymbolicSet::assemble(payloads, schedule)?;
    let source = PartialSeq::from_slots(f.slots()[..consumed as usize].to_vec());
    Ok(GammaImage { set, source })
}
