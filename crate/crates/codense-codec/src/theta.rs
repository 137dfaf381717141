use crate::error::CodecError;
use codense_core::FiniteBitSet;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;

/// Finitely supported family of bit vectors of one fixed width, indexed by
/// machine words. Indices outside the stored support read as the empty
/// vector; empty vectors are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theta {
    arity: usize,
    support: BTreeMap<u64, FiniteBitSet>,
}

impl Theta {
    pub fn new(arity: usize) -> Result<Self, CodecError> {
        if arity == 0 {
            return Err(CodecError::ZeroArity);
        }
        Ok(Theta { arity, support: BTreeMap::new() })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Vector at `index`; the empty vector when unlisted.
    pub fn get(&self, index: u64) -> FiniteBitSet {
        self.support.get(&index).cloned().unwrap_or_else(|| FiniteBitSet::zeros(self.arity))
    }

    /// Writes the vector at `index`, dropping it from the support when it has
    /// no set bits.
    pub fn set(&mut self, index: u64, bits: FiniteBitSet) -> Result<(), CodecError> {
        if bits.len() != self.arity {
            return Err(CodecError::BlockLength { index, got: bits.len(), want: self.arity });
        }
        if bits.card() == 0 {
            self.support.remove(&index);
        } else {
            self.support.insert(index, bits);
        }
        Ok(())
    }

    /// Stored (index, vector) pairs in index order; every vector is nonempty.
    pub fn support(&self) -> impl Iterator<Item = (u64, &FiniteBitSet)> {
        self.support.iter().map(|(&s, b)| (s, b))
    }

    pub fn support_len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Bulk constructor from nonempty word masks sorted by index.
    pub(crate) fn from_sorted_masks(arity: usize, entries: &[(u64, u64)]) -> Theta {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|&(_, w)| w != 0));
        let support = entries
            .iter()
            .map(|&(s, w)| {
                (s, FiniteBitSet::from_ones(arity, (0..arity).filter(|&x| w >> x & 1 == 1)))
            })
            .collect();
        Theta { arity, support }
    }
}

/// Largest per-index disagreement: `sup` over all indices of the cardinality
/// of the symmetric difference of the two vectors there. Zero exactly when
/// the families are equal.
pub fn ddist(a: &Theta, b: &Theta) -> Result<usize, CodecError> {
    if a.arity != b.arity {
        return Err(CodecError::ArityMismatch { left: a.arity, right: b.arity });
    }
    let mut best = 0;
    for (&s, bits) in &a.support {
        best = best.max(bits.symdiff_card(&b.get(s)));
    }
    for (&s, bits) in &b.support {
        if !a.support.contains_key(&s) {
            best = best.max(bits.card());
        }
    }
    Ok(best)
}

/// Indices `[n^n m^n, n^n (m+1)^n)` for width `n`, clamped into machine
/// words; `None` marks a bound past `u64::MAX` (nothing is stored there).
fn block_bounds(n: usize, m: u64) -> (Option<u64>, Option<u64>) {
    let pow = |base: u128, exp: u32| -> Option<u128> {
        base.checked_pow(exp).filter(|&v| v <= u64::MAX as u128)
    };
    let nn = pow(n as u128, n as u32);
    let lo = nn.and_then(|nn| pow(m as u128, n as u32).and_then(|mm| nn.checked_mul(mm)));
    let hi = nn.and_then(|nn| pow(m as u128 + 1, n as u32).and_then(|mm| nn.checked_mul(mm)));
    (
        lo.filter(|&v| v <= u64::MAX as u128).map(|v| v as u64),
        hi.filter(|&v| v <= u64::MAX as u128).map(|v| v as u64),
    )
}

/// Least `m` whose whole index block `[n^n m^n, n^n (m+1)^n)` is empty.
///
/// For an encoded tuple this recovers the tuple's maximum value. Blocks are
/// inspected in isolation: support above an empty block does not raise the
/// height.
pub fn height(theta: &Theta) -> u64 {
    let n = theta.arity;
    for m in 0.. {
        let empty = match block_bounds(n, m) {
            (Some(lo), Some(hi)) => theta.support.range(lo..hi).next().is_none(),
            (Some(lo), None) => theta.support.range(lo..).next().is_none(),
            (None, _) => true,
        };
        if empty {
            return m;
        }
    }
    unreachable!("support is finite")
}

/// Copy with every index at or past `n^n (height + 1)^n` zeroed.
pub fn truncate(theta: &Theta) -> Theta {
    let h = height(theta);
    let mut out = Theta { arity: theta.arity, support: BTreeMap::new() };
    match block_bounds(theta.arity, h + 1).0 {
        Some(bound) => {
            for (&s, bits) in theta.support.range(..bound) {
                out.support.insert(s, bits.clone());
            }
        }
        None => out.support = theta.support.clone(),
    }
    out
}

#[derive(Serialize, Deserialize)]
struct ThetaRepr {
    arity: usize,
    support: BTreeMap<u64, FiniteBitSet>,
}

impl Serialize for Theta {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ThetaRepr { arity: self.arity, support: self.support.clone() }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Theta {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let repr = ThetaRepr::deserialize(de)?;
        let mut theta = Theta::new(repr.arity).map_err(D::Error::custom)?;
        for (s, bits) in repr.support {
            theta.set(s, bits).map_err(D::Error::custom)?;
        }
        Ok(theta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta(arity: usize, entries: &[(u64, &str)]) -> Theta {
        let mut t = Theta::new(arity).unwrap();
        for &(s, bits) in entries {
            t.set(s, bits.parse().unwrap()).unwrap();
        }
        t
    }

    #[test]
    fn empty_entries_are_not_stored() {
        let mut t = Theta::new(2).unwrap();
        t.set(3, "00".parse().unwrap()).unwrap();
        assert!(t.is_empty());
        t.set(3, "01".parse().unwrap()).unwrap();
        t.set(3, "00".parse().unwrap()).unwrap();
        assert!(t.is_empty());
        assert_eq!(t.get(3).to_string(), "00");
        assert!(t.set(1, "0".parse().unwrap()).is_err());
    }

    #[test]
    fn distance_examples() {
        let a = theta(2, &[]);
        let b = theta(2, &[(0, "11")]);
        let c = theta(2, &[(0, "10"), (9, "01")]);
        assert_eq!(ddist(&a, &a).unwrap(), 0);
        assert_eq!(ddist(&a, &b).unwrap(), 2);
        assert_eq!(ddist(&b, &c).unwrap(), 1);
        assert_eq!(ddist(&c, &b).unwrap(), 1);
        assert!(ddist(&a, &theta(3, &[])).is_err());
    }

    #[test]
    fn height_looks_for_an_empty_block() {
        // Width 2: block m is [4 m^2, 4 (m+1)^2).
        assert_eq!(height(&theta(2, &[])), 0);
        assert_eq!(height(&theta(2, &[(0, "01")])), 1);
        assert_eq!(height(&theta(2, &[(3, "01"), (4, "10")])), 2);
        // A gap at block 1 ([4, 16)) stops the search regardless of what
        // sits above it.
        assert_eq!(height(&theta(2, &[(0, "01"), (100, "11")])), 1);
    }

    #[test]
    fn truncation_drops_everything_past_the_height_block() {
        let t = theta(2, &[(0, "01"), (100, "11")]);
        let cut = truncate(&t);
        assert_eq!(height(&t), 1);
        assert_eq!(cut, theta(2, &[(0, "01")]));
        assert_eq!(truncate(&cut), cut);
    }

    #[test]
    fn serde_roundtrip_rejects_bad_lengths() {
        let t = theta(2, &[(0, "01"), (7, "11")]);
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(serde_json::from_str::<Theta>(&json).unwrap(), t);
        let bad = r#"{"arity": 2, "support": {"0": "011"}}"#;
        assert!(serde_json::from_str::<Theta>(bad).is_err());
    }
}
