use crate::bits::FiniteBitSet;
use crate::error::CoreError;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Finite partial function from naturals to naturals with domain inside
/// `[0, len)`; `None` slots are undefined, distinct from the value 0.
/// Positions at or beyond `len` are undefined as well.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(transparent)]
pub struct PartialSeq {
    slots: Vec<Option<u64>>,
}

impl PartialSeq {
    pub fn total(values: impl IntoIterator<Item = u64>) -> Self {
        PartialSeq { slots: values.into_iter().map(Some).collect() }
    }

    pub fn from_slots(slots: Vec<Option<u64>>) -> Self {
        PartialSeq { slots }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn get(&self, x: usize) -> Option<u64> {
        self.slots.get(x).copied().flatten()
    }

    pub fn set(&mut self, x: usize, v: Option<u64>) {
        if x >= self.slots.len() {
            self.slots.resize(x + 1, None);
        }
        self.slots[x] = v;
    }

    pub fn push(&mut self, v: Option<u64>) {
        self.slots.push(v);
    }

    pub fn is_total(&self) -> bool {
        self.slots.iter().all(Option::is_some)
    }

    pub fn slots(&self) -> &[Option<u64>] {
        &self.slots
    }

    /// The defined values in order; errors at the first undefined slot.
    pub fn values(&self) -> Result<Vec<u64>, CoreError> {
        self.slots
            .iter()
            .enumerate()
            .map(|(i, s)| s.ok_or(CoreError::UndefinedSlot(i as u64)))
            .collect()
    }

    /// Restriction to `[lo, hi)`, reindexed from 0. The whole interval must
    /// lie inside the domain and every slot in it must be defined.
    pub fn slice(&self, lo: u64, hi: u64) -> Result<PartialSeq, CoreError> {
        assert!(lo <= hi, "interval ends out of order");
        if hi > self.slots.len() as u64 {
            return Err(CoreError::IntervalOutOfRange { lo, hi, len: self.slots.len() as u64 });
        }
        let mut out = Vec::with_capacity((hi - lo) as usize);
        for x in lo..hi {
            out.push(Some(self.get(x as usize).ok_or(CoreError::UndefinedSlot(x))?));
        }
        Ok(PartialSeq { slots: out })
    }
}

impl fmt::Debug for PartialSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, s) in self.slots.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            match s {
                Some(v) => write!(f, "{v}")?,
                None => write!(f, "^")?,
            }
        }
        write!(f, ")")
    }
}

/// Positions where both sequences are defined and their values differ,
/// over the common length. Undefined slots never enter the set.
pub fn symdiff(f: &PartialSeq, g: &PartialSeq) -> FiniteBitSet {
    let len = f.len().min(g.len());
    FiniteBitSet::from_ones(
        len,
        (0..len).filter(|&x| match (f.get(x), g.get(x)) {
            (Some(a), Some(b)) => a != b,
            _ => false,
        }),
    )
}

/// Overlay preferring the first argument where it is defined. The result has
/// the longer length.
pub fn overlay(sigma: &PartialSeq, f: &PartialSeq) -> PartialSeq {
    let len = sigma.len().max(f.len());
    PartialSeq::from_slots((0..len).map(|x| sigma.get(x).or_else(|| f.get(x))).collect())
}

/// A natural number or the opaque wildcard symbol.
#[derive(Copy, Clone, PartialEq, Eq, Hash, Debug)]
pub enum BoxVal {
    Val(u64),
    Box,
}

impl BoxVal {
    pub fn as_val(self) -> Option<u64> {
        match self {
            BoxVal::Val(v) => Some(v),
            BoxVal::Box => None,
        }
    }

    pub fn is_box(self) -> bool {
        matches!(self, BoxVal::Box)
    }
}

impl Serialize for BoxVal {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        self.as_val().serialize(ser)
    }
}

impl<'de> Deserialize<'de> for BoxVal {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        Ok(match Option::<u64>::deserialize(de)? {
            Some(v) => BoxVal::Val(v),
            None => BoxVal::Box,
        })
    }
}

/// Total sequence over naturals plus the wildcard. Serialized as a list with
/// `null` for the wildcard slots.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(transparent)]
pub struct BoxSeq {
    slots: Vec<BoxVal>,
}

impl BoxSeq {
    pub fn new(slots: Vec<BoxVal>) -> Self {
        BoxSeq { slots }
    }

    /// Conversion from a partial sequence; errors on any undefined slot.
    pub fn from_total(f: &PartialSeq) -> Result<Self, CoreError> {
        Ok(BoxSeq {
            slots: f
                .slots()
                .iter()
                .enumerate()
                .map(|(i, s)| s.map(BoxVal::Val).ok_or(CoreError::UndefinedSlot(i as u64)))
                .collect::<Result<_, _>>()?,
        })
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn get(&self, x: usize) -> Option<BoxVal> {
        self.slots.get(x).copied()
    }

    pub fn slots(&self) -> &[BoxVal] {
        &self.slots
    }

    /// Wildcard written over every position in `S`; other slots unchanged.
    pub fn box_mask(&self, s: &FiniteBitSet) -> BoxSeq {
        BoxSeq {
            slots: self
                .slots
                .iter()
                .enumerate()
                .map(|(x, &v)| if x < s.len() && s.get(x) { BoxVal::Box } else { v })
                .collect(),
        }
    }

    /// Positions holding an actual value (not the wildcard).
    pub fn strong_dom(&self) -> FiniteBitSet {
        FiniteBitSet::from_ones(
            self.slots.len(),
            self.slots.iter().enumerate().filter_map(|(x, v)| v.as_val().map(|_| x)),
        )
    }

    /// Pointwise agreement up to wildcards: at every position the values are
    /// equal or at least one side is the wildcard.
    ///
    /// Panics when the lengths differ.
    pub fn sagree(&self, other: &BoxSeq) -> bool {
        assert_eq!(self.len(), other.len(), "agreement needs equal lengths");
        self.slots.iter().zip(&other.slots).all(|(a, b)| match (a, b) {
            (BoxVal::Val(x), BoxVal::Val(y)) => x == y,
            _ => true,
        })
    }
}

impl fmt::Debug for BoxSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, s) in self.slots.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            match s {
                BoxVal::Val(v) => write!(f, "{v}")?,
                BoxVal::Box => write!(f, "#")?,
            }
        }
        write!(f, ")")
    }
}

/// Wildcard mask applied to a partial sequence: positions in `S` become the
/// wildcard, every position outside `S` must be defined.
pub fn box_mask_partial(f: &PartialSeq, s: &FiniteBitSet) -> Result<BoxSeq, CoreError> {
    Ok(BoxSeq {
        slots: (0..f.len())
            .map(|x| {
                if x < s.len() && s.get(x) {
                    Ok(BoxVal::Box)
                } else {
                    f.get(x).map(BoxVal::Val).ok_or(CoreError::UndefinedSlot(x as u64))
                }
            })
            .collect::<Result<_, _>>()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symdiff_requires_both_defined() {
        let f = PartialSeq::from_slots(vec![Some(1), None, Some(3)]);
        let g = PartialSeq::total([2, 4, 3]);
        assert_eq!(symdiff(&f, &g).iter_ones().collect::<Vec<_>>(), vec![0]);
        assert_eq!(symdiff(&g, &g).card(), 0);
        let h = PartialSeq::total([1, 2, 3]);
        let k = PartialSeq::total([1, 5, 3]);
        assert_eq!(symdiff(&h, &k).iter_ones().collect::<Vec<_>>(), vec![1]);
    }

    #[test]
    fn overlay_prefers_first() {
        let sigma = PartialSeq::from_slots(vec![Some(9), None]);
        let f = PartialSeq::total([1, 2, 3]);
        assert_eq!(overlay(&sigma, &f), PartialSeq::total([9, 2, 3]));
    }

    #[test]
    fn slice_with_holes_errors() {
        let f = PartialSeq::total([9, 7, 5, 3]);
        assert_eq!(f.slice(1, 3).unwrap(), PartialSeq::total([7, 5]));
        let g = PartialSeq::from_slots(vec![Some(9), None, Some(5)]);
        assert_eq!(g.slice(1, 3), Err(CoreError::UndefinedSlot(1)));
        assert!(matches!(f.slice(2, 9), Err(CoreError::IntervalOutOfRange { .. })));
    }

    #[test]
    fn masking_and_agreement() {
        let f = PartialSeq::total([5, 6, 7]);
        let masked = box_mask_partial(&f, &FiniteBitSet::from_ones(2, [1])).unwrap();
        assert_eq!(masked.slots(), &[BoxVal::Val(5), BoxVal::Box, BoxVal::Val(7)]);
        assert_eq!(masked.strong_dom().iter_ones().collect::<Vec<_>>(), vec![0, 2]);

        let a = BoxSeq::new(vec![BoxVal::Val(5), BoxVal::Box]);
        let b = BoxSeq::new(vec![BoxVal::Box, BoxVal::Val(9)]);
        assert!(a.sagree(&b));
        let c = BoxSeq::new(vec![BoxVal::Val(6), BoxVal::Box]);
        assert!(!a.sagree(&c));
    }

    #[test]
    fn boxval_serde_uses_null() {
        let s = BoxSeq::new(vec![BoxVal::Val(3), BoxVal::Box]);
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, "[3,null]");
        let back: BoxSeq = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }
}
