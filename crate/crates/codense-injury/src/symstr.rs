//! Binary strings whose lengths may exceed memory.
//!
//! A value is an explicit bit set, or an earlier value zero-padded to a new
//! length, with a finite set of flipped positions layered on top.  Padding
//! chains grow once per stage, so depth stays machine sized even when the
//! lengths themselves do not.  Flips always land at machine-representable
//! positions, so bit queries stay exact at every scale.

use codense_core::{code_bits, FiniteBitSet};
use num::bigint::BigUint;
use num::Zero;
use serde_json::{json, Value};
use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::rc::Rc;

use crate::scale::StrLen;

#[derive(Clone, Debug)]
enum StrBase {
    Explicit(Rc<FiniteBitSet>),
    Padded(Rc<SymStr>),
}

/// A binary string of possibly unbounded length: a base (explicit bits, or a
/// shorter string zero-padded) plus a set of flipped positions.
#[derive(Clone, Debug)]
pub struct SymStr {
    base: StrBase,
    len: StrLen,
    flips: BTreeSet<BigUint>,
}

impl SymStr {
    pub fn explicit(bits: FiniteBitSet) -> Self {
        let len = StrLen::fin(BigUint::from(bits.len()));
        SymStr { base: StrBase::Explicit(Rc::new(bits)), len, flips: BTreeSet::new() }
    }

    pub fn empty() -> Self {
        SymStr::explicit(FiniteBitSet::zeros(0))
    }

    /// Zero-pads `inner` out to `len`, which must be strictly longer.
    pub fn padded(inner: SymStr, len: StrLen) -> Self {
        assert_eq!(inner.len.cmp_len(&len), Ordering::Less, "padding must lengthen");
        SymStr { base: StrBase::Padded(Rc::new(inner)), len, flips: BTreeSet::new() }
    }

    pub fn len(&self) -> &StrLen {
        &self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len.cmp_big(&BigUint::zero()) == Ordering::Equal
    }

    /// The bit at `pos`, which must lie below the length.
    pub fn bit(&self, pos: &BigUint) -> bool {
        assert_eq!(self.len.cmp_big(pos), Ordering::Greater, "bit index out of range");
        let base = match &self.base {
            StrBase::Explicit(b) => {
                let i = usize::try_from(pos).expect("explicit strings are machine sized");
                b.get(i)
            }
            StrBase::Padded(inner) => {
                if inner.len.cmp_big(pos) == Ordering::Greater {
                    inner.bit(pos)
                } else {
                    false
                }
            }
        };
        base ^ self.flips.contains(pos)
    }

    /// A copy with the bit at `pos` toggled.
    pub fn flip(&self, pos: &BigUint) -> SymStr {
        assert_eq!(self.len.cmp_big(pos), Ordering::Greater, "flip index out of range");
        let mut out = self.clone();
        if !out.flips.insert(pos.clone()) {
            out.flips.remove(pos);
        }
        out
    }

    /// Every position this value's layers have ever flipped.
    pub fn all_flip_positions(&self) -> BTreeSet<BigUint> {
        let mut out = BTreeSet::new();
        let mut cur = self;
        loop {
            out.extend(cur.flips.iter().cloned());
            match &cur.base {
                StrBase::Explicit(_) => return out,
                StrBase::Padded(inner) => cur = inner,
            }
        }
    }

    /// The first `k` bits as an explicit set; `k` must not exceed the length.
    pub fn prefix_bits(&self, k: usize) -> FiniteBitSet {
        assert_ne!(self.len.cmp_big(&BigUint::from(k)), Ordering::Less, "prefix too long");
        let mut out = FiniteBitSet::zeros(k);
        for i in 0..k {
            out.set(i, self.bit(&BigUint::from(i)));
        }
        out
    }

    /// Fully explicit form, when the length fits under `cap` bits.
    pub fn materialize(&self, cap: usize) -> Option<FiniteBitSet> {
        let n = usize::try_from(self.len.as_fin()?).ok()?;
        if n > cap {
            return None;
        }
        let mut out = match &self.base {
            StrBase::Explicit(b) => (**b).clone(),
            StrBase::Padded(inner) => inner.materialize(cap)?.padded(n),
        };
        for p in &self.flips {
            let i = usize::try_from(p).expect("flip below a machine-sized length");
            out.set(i, !out.get(i));
        }
        Some(out)
    }

    /// The numeric code of the string, when short enough to hold.
    pub fn code_value(&self, cap: usize) -> Option<BigUint> {
        self.materialize(cap).map(|b| code_bits(&b))
    }

    pub fn describe(&self) -> Value {
        let kind = match &self.base {
            StrBase::Explicit(_) => "explicit",
            StrBase::Padded(_) => "padded",
        };
        json!({
            "len": self.len.describe(),
            "base": kind,
            "flips": self.flips.len(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::One;

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    fn bits(s: &str) -> FiniteBitSet {
        FiniteBitSet::from_bools(&s.bytes().map(|b| b == b'1').collect::<Vec<_>>())
    }

    #[test]
    fn bit_reads_through_padding_and_flips() {
        let a = SymStr::explicit(bits("101"));
        let b = SymStr::padded(a, StrLen::fin(big(6)));
        assert_eq!(b.materialize(64).unwrap(), bits("101000"));

        let c = b.flip(&big(4)).flip(&big(0));
        assert_eq!(c.materialize(64).unwrap(), bits("001010"));
        for i in 0..6u64 {
            assert_eq!(c.bit(&big(i)), c.materialize(64).unwrap().get(i as usize));
        }
    }

    #[test]
    fn flip_is_an_involution() {
        let a = SymStr::explicit(bits("0000"));
        let twice = a.flip(&big(2)).flip(&big(2));
        assert_eq!(twice.materialize(16).unwrap(), bits("0000"));
        assert!(twice.all_flip_positions().is_empty());
    }

    #[test]
    fn flips_collect_across_layers() {
        let a = SymStr::explicit(bits("00")).flip(&big(1));
        let b = SymStr::padded(a, StrLen::fin(big(5))).flip(&big(3));
        let got = b.all_flip_positions();
        assert_eq!(got, [big(1), big(3)].into_iter().collect());
        assert_eq!(b.materialize(16).unwrap(), bits("01010"));
    }

    #[test]
    fn symbolic_lengths_answer_bit_queries() {
        // A short explicit core padded to a length too big to materialize.
        let core = SymStr::explicit(bits("11"));
        let long = SymStr::padded(core, StrLen::hat(12, &big(1 << 20)));
        assert!(long.materialize(1 << 24).is_none());
        assert!(long.bit(&big(0)));
        assert!(long.bit(&big(1)));
        assert!(!long.bit(&(BigUint::one() << 2000u32)));
        let flipped = long.flip(&(BigUint::one() << 2000u32));
        assert!(flipped.bit(&(BigUint::one() << 2000u32)));
    }

    #[test]
    fn code_of_short_strings() {
        assert_eq!(SymStr::empty().code_value(8), Some(BigUint::zero()));
        assert_eq!(SymStr::explicit(bits("1")).code_value(8), Some(big(2)));
    }
}
