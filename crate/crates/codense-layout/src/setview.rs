use crate::error::LayoutError;
use crate::rows::{layout_rows, LayoutRow, Scale};
use crate::schedule::LayoutSchedule;
use codense_core::{FiniteBitSet, Rational};
use num::bigint::{BigInt, BigUint};
use num::{One, Zero};

/// A set described by per-row payloads: empty on every fallow gap, the
/// `2^{r_i}`-fold repetition of payload `i` on every coding interval. Bit
/// queries resolve arithmetically; the set is never materialized.
#[derive(Clone, Debug)]
pub struct SymbolicSet {
    rows: Vec<LayoutRow>,
    payloads: Vec<FiniteBitSet>,
}

impl SymbolicSet {
    pub fn assemble(
        payloads: Vec<FiniteBitSet>,
        schedule: &LayoutSchedule,
    ) -> Result<Self, LayoutError> {
        let rows = layout_rows(schedule, payloads.len())?;
        for (row, payload) in rows.iter().zip(&payloads) {
            if payload.len() != row.width() {
                return Err(LayoutError::PayloadLength {
                    row: row.index,
                    got: payload.len(),
                    want: row.width(),
                });
            }
        }
        Ok(SymbolicSet { rows, payloads })
    }

    pub fn rows(&self) -> &[LayoutRow] {
        &self.rows
    }

    pub fn payloads(&self) -> &[FiniteBitSet] {
        &self.payloads
    }

    /// Membership of an arbitrary-precision position. Fallow gaps answer 0;
    /// inside a coding interval the payload is indexed modulo its width.
    pub fn query_bit(&self, x: &BigUint) -> Result<bool, LayoutError> {
        for (row, payload) in self.rows.iter().zip(&self.payloads) {
            match &row.l_lo {
                // The interval start is beyond every representable value, so
                // x falls in the fallow gap before it.
                Scale::Huge => return Ok(false),
                Scale::Exact(lo) => {
                    if x < lo {
                        return Ok(false);
                    }
                    let inside = match &row.l_hi {
                        Scale::Exact(hi) => x < hi,
                        Scale::Huge => true,
                    };
                    if inside {
                        let offset = x - lo;
                        let idx = offset % BigUint::from(row.width());
                        let idx = usize::try_from(&idx).expect("reduced index is small");
                        return Ok(payload.get(idx));
                    }
                }
            }
        }
        Err(LayoutError::PositionBeyondLayout)
    }

    /// Count of the set below the start of row `i`, i.e. the contribution of
    /// all earlier rows. Needs every earlier copy count to be representable.
    pub fn count_before(&self, i: usize) -> Result<BigUint, LayoutError> {
        let mut total = BigUint::zero();
        for (row, payload) in self.rows.iter().zip(&self.payloads).take(i) {
            if payload.card() == 0 {
                continue;
            }
            let copies = match row.copies() {
                Scale::Exact(c) => c,
                Scale::Huge => {
                    return Err(LayoutError::RowTooLarge { row: row.index, what: "copy count" })
                }
            };
            total += copies * BigUint::from(payload.card());
        }
        Ok(total)
    }

    /// Exact windowed upper density over row `i`: the maximum over prefix
    /// lengths `l` in `[l_lo, l_hi - 1]` of `|X restricted to l| / l`.
    pub fn window_density_row(&self, i: usize) -> Result<Rational, LayoutError> {
        let row = self.rows.get(i).ok_or(LayoutError::ScheduleExhausted(self.rows.len()))?;
        let base = self.count_before(i)?;
        window_density_row_local(row, &self.payloads[i], &base)
    }
}

/// Row-local form of the windowed density: the row's interval data, its
/// payload, and the count of set elements below `l_prev` are all that the
/// density depends on.
///
/// The count along the interval is a step function that increases only just
/// past a 1-bit of some copy, and along the jump points of a fixed payload
/// bit the prefix fraction is monotone in the copy number, so the maximum is
/// attained either at the interval start or at a first/last copy jump point.
/// That leaves at most `2 card(payload) + 1` exact rational comparisons.
pub fn window_density_row_local(
    row: &LayoutRow,
    payload: &FiniteBitSet,
    base: &BigUint,
) -> Result<Rational, LayoutError> {
    if payload.len() != row.width() {
        return Err(LayoutError::PayloadLength {
            row: row.index,
            got: payload.len(),
            want: row.width(),
        });
    }
    let lo = match &row.l_lo {
        Scale::Exact(lo) => lo,
        Scale::Huge => {
            return Err(LayoutError::RowTooLarge { row: row.index, what: "interval start" })
        }
    };
    let hi = match &row.l_hi {
        Scale::Exact(hi) => hi,
        Scale::Huge => {
            return Err(LayoutError::RowTooLarge { row: row.index, what: "interval end" })
        }
    };
    if let Scale::Exact(prev) = &row.l_prev {
        if base > prev {
            return Err(LayoutError::BaseCountTooLarge);
        }
    }

    let w = BigUint::from(row.width());
    let span = hi - lo; // 2^{n + r}
    let card = BigUint::from(payload.card());

    // Candidate prefix lengths paired with their exact element counts.
    let mut best_num = base.clone();
    let mut best_den = lo.clone();
    let mut consider = |num: BigUint, den: BigUint| {
        if &num * &best_den > &best_num * &den {
            best_num = num;
            best_den = den;
        }
    };
    for j in payload.iter_ones() {
        let ones_through_j = BigUint::from(payload.count_below(j + 1));
        let jump = BigUint::from(j as u64 + 1);
        let p_last = (&span - &jump - BigUint::one()) / &w;
        let mut ps = vec![BigUint::zero()];
        if !p_last.is_zero() {
            ps.push(p_last);
        }
        for p in ps {
            let count = base + &p * &card + &ones_through_j;
            let l = lo + &p * &w + &jump;
            consider(count, l);
        }
    }

    // Unreduced on purpose: the interval bounds can run to millions of bits,
    // where the gcd dominates the whole computation. `Ratio` compares by
    // value, so callers never observe the difference.
    Ok(Rational::new_raw(
        BigInt::from(best_num),
        BigInt::from(best_den),
    ))
}
