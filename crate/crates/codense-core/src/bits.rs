use crate::error::CoreError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

/// Fixed-length bit string, identified with the subset `{x < len : bit x = 1}`.
///
/// Index 0 is the leftmost character of the display form, so `"0111"` has
/// bit 0 clear and bits 1..4 set. Bits beyond `len` in the backing words are
/// kept zero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct FiniteBitSet {
    words: Vec<u64>,
    len: usize,
}

impl FiniteBitSet {
    /// All-zero string of the given length.
    pub fn zeros(len: usize) -> Self {
        FiniteBitSet { words: vec![0; len.div_ceil(64)], len }
    }

    /// All-one string of the given length.
    pub fn ones(len: usize) -> Self {
        let mut s = Self::zeros(len);
        for i in 0..len {
            s.set(i, true);
        }
        s
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut s = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            s.set(i, b);
        }
        s
    }

    /// Set of the given length containing exactly the listed positions.
    pub fn from_ones(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::zeros(len);
        for i in ones {
            s.set(i, true);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Bit at position `i`. Panics if `i >= len`.
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    /// Writes position `i`. Panics if `i >= len`.
    pub fn set(&mut self, i: usize, v: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let (w, b) = (i / 64, i % 64);
        if v {
            self.words[w] |= 1 << b;
        } else {
            self.words[w] &= !(1 << b);
        }
    }

    pub fn push(&mut self, v: bool) {
        self.len += 1;
        if self.words.len() * 64 < self.len {
            self.words.push(0);
        }
        self.set(self.len - 1, v);
    }

    /// Number of set positions.
    pub fn card(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of set positions strictly below `l`. Panics if `l > len`.
    pub fn count_below(&self, l: usize) -> usize {
        assert!(l <= self.len, "prefix bound {l} exceeds length {}", self.len);
        let full = l / 64;
        let mut c: usize = self.words[..full].iter().map(|w| w.count_ones() as usize).sum();
        if l % 64 != 0 {
            c += (self.words[full] & ((1u64 << (l % 64)) - 1)).count_ones() as usize;
        }
        c
    }

    /// Number of set positions in `[lo, hi)`.
    pub fn count_range(&self, lo: usize, hi: usize) -> usize {
        assert!(lo <= hi);
        self.count_below(hi) - self.count_below(lo)
    }

    /// Symmetric difference as sets; the result has the longer length and the
    /// shorter operand is read as zero beyond its end.
    pub fn symdiff(&self, other: &FiniteBitSet) -> FiniteBitSet {
        let len = self.len.max(other.len);
        let mut out = FiniteBitSet::zeros(len);
        for (i, w) in out.words.iter_mut().enumerate() {
            let a = self.words.get(i).copied().unwrap_or(0);
            let b = other.words.get(i).copied().unwrap_or(0);
            *w = a ^ b;
        }
        out
    }

    /// Cardinality of the symmetric difference, without building it.
    pub fn symdiff_card(&self, other: &FiniteBitSet) -> usize {
        let words = self.words.len().max(other.words.len());
        (0..words)
            .map(|i| {
                let a = self.words.get(i).copied().unwrap_or(0);
                let b = other.words.get(i).copied().unwrap_or(0);
                (a ^ b).count_ones() as usize
            })
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Positions of set bits, ascending.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    /// Copy of the bits in `[lo, hi)` as a string of length `hi - lo`.
    pub fn slice(&self, lo: usize, hi: usize) -> FiniteBitSet {
        assert!(lo <= hi && hi <= self.len);
        FiniteBitSet::from_bools(&(lo..hi).map(|i| self.get(i)).collect::<Vec<_>>())
    }

    /// `k` concatenated copies of `self`.
    pub fn repeat(&self, k: usize) -> FiniteBitSet {
        let mut out = FiniteBitSet::zeros(self.len * k);
        for c in 0..k {
            for i in self.iter_ones() {
                out.set(c * self.len + i, true);
            }
        }
        out
    }

    /// Zero-extended copy of length `len`. Panics if `len < self.len()`.
    pub fn padded(&self, len: usize) -> FiniteBitSet {
        assert!(len >= self.len);
        let mut out = FiniteBitSet::zeros(len);
        for i in self.iter_ones() {
            out.set(i, true);
        }
        out
    }

    /// Prefix order on strings.
    pub fn is_prefix_of(&self, other: &FiniteBitSet) -> bool {
        self.len <= other.len && (0..self.len).all(|i| self.get(i) == other.get(i))
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub(crate) fn from_words(words: Vec<u64>, len: usize) -> Self {
        let mut s = FiniteBitSet { words, len };
        s.words.resize(len.div_ceil(64), 0);
        let spare = s.words.len() * 64 - len;
        if spare > 0 {
            let last = s.words.len() - 1;
            s.words[last] &= u64::MAX >> spare;
        }
        s
    }
}

impl fmt::Display for FiniteBitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for FiniteBitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bits\"{self}\"")
    }
}

impl FromStr for FiniteBitSet {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self, CoreError> {
        let mut out = FiniteBitSet::zeros(s.chars().count());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => out.set(i, true),
                other => return Err(CoreError::BadBitChar(other)),
            }
        }
        Ok(out)
    }
}

impl Serialize for FiniteBitSet {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FiniteBitSet {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_display_roundtrip() {
        for s in ["", "0", "1", "0111", "1100", "101010"] {
            let b: FiniteBitSet = s.parse().unwrap();
            assert_eq!(b.to_string(), s);
            assert_eq!(b.len(), s.len());
        }
        assert!(matches!("01x".parse::<FiniteBitSet>(), Err(CoreError::BadBitChar('x'))));
    }

    #[test]
    fn counting() {
        let b: FiniteBitSet = "0111010".parse().unwrap();
        assert_eq!(b.card(), 4);
        assert_eq!(b.count_below(0), 0);
        assert_eq!(b.count_below(2), 1);
        assert_eq!(b.count_below(7), 4);
        assert_eq!(b.count_range(1, 4), 3);
    }

    #[test]
    fn symdiff_handles_unequal_lengths() {
        let a: FiniteBitSet = "101".parse().unwrap();
        let b: FiniteBitSet = "10011".parse().unwrap();
        let d = a.symdiff(&b);
        assert_eq!(d.to_string(), "00111");
        assert_eq!(a.symdiff(&a).card(), 0);
        assert_eq!(a.symdiff_card(&b), 3);
        assert_eq!(b.symdiff_card(&a), 3);
        assert_eq!(a.symdiff_card(&a), 0);
    }

    #[test]
    fn repeat_and_slice() {
        let s: FiniteBitSet = "01".parse().unwrap();
        assert_eq!(s.repeat(3).to_string(), "010101");
        assert_eq!(s.repeat(3).slice(2, 4).to_string(), "01");
    }

    #[test]
    fn prefix_order() {
        let a: FiniteBitSet = "01".parse().unwrap();
        let b: FiniteBitSet = "011".parse().unwrap();
        assert!(a.is_prefix_of(&b));
        assert!(!b.is_prefix_of(&a));
        assert!("".parse::<FiniteBitSet>().unwrap().is_prefix_of(&a));
    }

    #[test]
    fn word_boundaries() {
        let mut b = FiniteBitSet::zeros(130);
        b.set(63, true);
        b.set(64, true);
        b.set(129, true);
        assert_eq!(b.card(), 3);
        assert_eq!(b.count_below(64), 1);
        assert_eq!(b.count_below(65), 2);
        assert_eq!(b.iter_ones().collect::<Vec<_>>(), vec![63, 64, 129]);
    }
}
