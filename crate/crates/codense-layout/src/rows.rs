use crate::error::LayoutError;
use crate::schedule::LayoutSchedule;
use num::bigint::BigUint;
use num::{One, Zero};
use serde::ser::SerializeStruct;
use serde::Serialize;

/// Largest exponent for which `2^e` is materialized as a big natural.
/// Beyond it values carry the `Huge` marker; no operation approximates them.
pub const SCALE_CAP_BITS: u64 = 1 << 26;

/// Maximum payload width exponent: payload bit-vectors must stay machine
/// sized.
pub const MAX_WIDTH_EXP: u32 = 25;

/// A row magnitude: either an exact big natural or a marker for values whose
/// sheer bit-length is beyond materializing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scale {
    Exact(BigUint),
    Huge,
}

impl Scale {
    pub fn exact(&self) -> Option<&BigUint> {
        match self {
            Scale::Exact(v) => Some(v),
            Scale::Huge => None,
        }
    }

    pub fn is_huge(&self) -> bool {
        matches!(self, Scale::Huge)
    }

    /// `2^e`, subject to the materialization cap.
    fn pow2(e: &Scale) -> Scale {
        match e {
            Scale::Huge => Scale::Huge,
            Scale::Exact(e) => match u64::try_from(e) {
                Ok(e) if e <= SCALE_CAP_BITS => Scale::Exact(BigUint::one() << e),
                _ => Scale::Huge,
            },
        }
    }

    fn add(&self, other: &Scale) -> Scale {
        match (self, other) {
            (Scale::Exact(a), Scale::Exact(b)) => Scale::Exact(a + b),
            _ => Scale::Huge,
        }
    }

    fn add_small(&self, k: u64) -> Scale {
        self.add(&Scale::Exact(BigUint::from(k)))
    }

    fn sub_small(&self, k: u64) -> Scale {
        match self {
            Scale::Exact(v) => Scale::Exact(v - BigUint::from(k)),
            Scale::Huge => Scale::Huge,
        }
    }
}

impl Serialize for Scale {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        match self {
            Scale::Exact(v) => ser.serialize_some(&v.to_string()),
            Scale::Huge => ser.serialize_none(),
        }
    }
}

/// One laid-out row: schedule parameters plus derived magnitudes. `l_lo` and
/// `l_hi` bound the coding interval; the fallow gap is `[l_prev, l_lo)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayoutRow {
    pub index: usize,
    pub n: u32,
    pub s: u32,
    pub b: u32,
    pub l_prev: Scale,
    pub r: Scale,
    pub l_lo: Scale,
    pub l_hi: Scale,
}

impl LayoutRow {
    /// Payload width `2^n` as a machine size.
    pub fn width(&self) -> usize {
        1usize << self.n
    }

    /// Copy count `2^r`.
    pub fn copies(&self) -> Scale {
        Scale::pow2(&self.r)
    }
}

impl Serialize for LayoutRow {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let mut st = ser.serialize_struct("LayoutRow", 8)?;
        st.serialize_field("index", &self.index)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("s", &self.s)?;
        st.serialize_field("b", &self.b)?;
        st.serialize_field("l_prev", &self.l_prev)?;
        st.serialize_field("r", &self.r)?;
        st.serialize_field("l_lo", &self.l_lo)?;
        st.serialize_field("l_hi", &self.l_hi)?;
        st.end()
    }
}

/// Builds one row from its parameters and the previous interval end. The
/// recurrences are local to the row, so `l_prev` is a free parameter here.
pub fn layout_row_local(
    index: usize,
    n: u32,
    s: u32,
    b: u32,
    l_prev: Scale,
) -> Result<LayoutRow, LayoutError> {
    if b == 0 {
        return Err(LayoutError::ZeroB(index));
    }
    if n > MAX_WIDTH_EXP {
        return Err(LayoutError::PayloadTooWide { row: index, n });
    }
    let r = l_prev.add_small(2 * b as u64 + n as u64);
    let l_lo = Scale::pow2(&r.sub_small(b as u64));
    let l_hi = l_lo.add(&Scale::pow2(&r.add_small(n as u64)));
    Ok(LayoutRow { index, n, s, b, l_prev, r, l_lo, l_hi })
}

/// Lays out rows `0..upto` of a schedule.
pub fn layout_rows(
    schedule: &LayoutSchedule,
    upto: usize,
) -> Result<Vec<LayoutRow>, LayoutError> {
    let mut rows = Vec::with_capacity(upto);
    let mut l_prev = Scale::Exact(BigUint::zero());
    for i in 0..upto {
        let drawn = schedule.draw(i)?;
        let row = layout_row_local(i, drawn.n, drawn.s, drawn.b, l_prev)?;
        l_prev = row.l_hi.clone();
        rows.push(row);
    }
    Ok(rows)
}
