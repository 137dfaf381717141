use crate::error::CoarseError;
use codense_codec::{decode, Theta};
use codense_core::{FiniteBitSet, PartialSeq};
use codense_layout::{mod_rep, mod_rep_inv, Scale, SymbolicSet};
use std::collections::BTreeMap;

/// A column of decoded blocks read off a laid-out set: for a fixed width
/// exponent `n`, the map from code index `s` to the majority vote over the
/// copies stored on the row carrying `(n, s)`.
///
/// Rows are assembled in draw order, so the available code indices for any
/// column form a contiguous range starting at 0; `coverage` is its length.
#[derive(Clone, Debug)]
pub struct ThetaView {
    n: u32,
    coverage: u64,
    theta: Theta,
}

impl ThetaView {
    /// Reads column `n` of `set`. Rows listed in `overrides` are decoded by
    /// strict majority from the supplied interval content instead of their
    /// stored payload; absent rows decode to the payload itself, which is
    /// what the vote returns when every copy is intact.
    pub fn build(
        set: &SymbolicSet,
        n: u32,
        overrides: &BTreeMap<usize, FiniteBitSet>,
    ) -> Result<ThetaView, CoarseError> {
        let arity = 1usize << n;
        let mut theta = Theta::new(arity)?;
        let mut coverage = 0u64;
        for row in set.rows().iter().filter(|row| row.n == n) {
            debug_assert_eq!(row.s as u64, coverage, "code indices are drawn contiguously");
            let block = match overrides.get(&row.index) {
                Some(bits) => {
                    let r = row_copy_exponent(&row.r)
                        .ok_or(CoarseError::RowNotMaterializable { row: row.index })?;
                    mod_rep_inv(bits, r)?
                }
                None => set.payloads()[row.index].clone(),
            };
            theta.set(row.s as u64, block)?;
            coverage += 1;
        }
        Ok(ThetaView { n, coverage, theta })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Number of contiguous code indices the view covers.
    pub fn coverage(&self) -> u64 {
        self.coverage
    }

    /// Decoded block at code index `s`; all zeros when unlisted.
    pub fn block(&self, s: u64) -> FiniteBitSet {
        self.theta.get(s)
    }

    pub fn theta(&self) -> &Theta {
        &self.theta
    }

    /// Recovers the value tuple the column codes.
    ///
    /// The support of a coded column stops after the first code block whose
    /// vectors are all zero, so decoding demands one fully covered empty
    /// block; runs that end before finding one cannot tell whether the
    /// support goes on, and err instead of guessing.
    pub fn decode_interval(&self) -> Result<Vec<u64>, CoarseError> {
        let arity = self.theta.arity() as u32;
        let nn = u128::from(arity).pow(arity);
        for m in 0u128.. {
            let block_lo = nn * m.pow(arity);
            let block_end = nn * (m + 1).pow(arity);
            if block_end > u128::from(self.coverage) {
                return Err(CoarseError::InsufficientRows { n: self.n, coverage: self.coverage });
            }
            let empty =
                (block_lo..block_end).all(|s| self.theta.get(s as u64).card() == 0);
            if empty {
                break;
            }
        }
        Ok(decode(&self.theta))
    }
}

fn row_copy_exponent(r: &Scale) -> Option<u32> {
    r.exact().and_then(|r| u32::try_from(r).ok())
}

/// The full interval content of row `i`: every copy of the payload written
/// out, bit `j` being the set's value at offset `j` from the interval start.
/// Only rows whose copy count fits in memory can be written out this way.
pub fn materialize_row(set: &SymbolicSet, i: usize) -> Result<FiniteBitSet, CoarseError> {
    let row = set
        .rows()
        .get(i)
        .ok_or(CoarseError::RowNotMaterializable { row: i })?;
    let r = row_copy_exponent(&row.r).ok_or(CoarseError::RowNotMaterializable { row: i })?;
    mod_rep(&set.payloads()[i], r).map_err(|_| CoarseError::RowNotMaterializable { row: i })
}

/// Recovers the source values on `I_n = [2^n, 2^{n+1})` from the image alone.
pub fn gamma_hat_interval(set: &SymbolicSet, n: u32) -> Result<Vec<u64>, CoarseError> {
    gamma_hat_interval_with(set, n, &BTreeMap::new())
}

/// [`gamma_hat_interval`] with per-row interval content substituted before
/// the majority vote, for studying recovery from corrupted copies.
pub fn gamma_hat_interval_with(
    set: &SymbolicSet,
    n: u32,
    overrides: &BTreeMap<usize, FiniteBitSet>,
) -> Result<Vec<u64>, CoarseError> {
    ThetaView::build(set, n, overrides)?.decode_interval()
}

/// Recovers the source on `[0, 2^cols)` column by column. Position 0 sits in
/// no interval and is pinned to 0.
pub fn gamma_hat_prefix(set: &SymbolicSet, cols: u32) -> Result<PartialSeq, CoarseError> {
    let mut f = PartialSeq::total([0]);
    for n in 0..cols {
        for v in gamma_hat_interval(set, n)? {
            f.push(Some(v));
        }
    }
    Ok(f)
}
