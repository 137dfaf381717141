//! Normalization of a priority listing of binary strings.
//!
//! A raw listing `p` (total, `p(0)` empty, `|p(s)| <= s`) is rewritten into a
//! listing `pi` that is injective, has non-decreasing lengths bounded by the
//! index, and preserves which strings admit long chains of proper prefix
//! extensions.  Each raw entry is replaced by the block of all its extensions
//! of one fixed length, chosen just long enough to clear everything emitted
//! so far.

use codense_core::FiniteBitSet;

/// A normalized listing together with the start index of each input's block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiSeq {
    strings: Vec<FiniteBitSet>,
    block_start: Vec<usize>,
}

impl PiSeq {
    pub fn len(&self) -> usize {
        self.strings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strings.is_empty()
    }

    pub fn get(&self, n: usize) -> &FiniteBitSet {
        &self.strings[n]
    }

    pub fn strings(&self) -> &[FiniteBitSet] {
        &self.strings
    }

    /// Start index of the block emitted for input stage `s`.
    pub fn block_start(&self, s: usize) -> usize {
        self.block_start[s]
    }
}

/// The length-`l` binary representation of `i`, most significant bit first.
fn binary_rep(i: usize, l: usize) -> FiniteBitSet {
    let mut out = FiniteBitSet::zeros(l);
    for b in 0..l {
        out.set(b, (i >> (l - 1 - b)) & 1 == 1);
    }
    out
}

fn concat(a: &FiniteBitSet, b: &FiniteBitSet) -> FiniteBitSet {
    let mut out = a.clone();
    for v in b.iter() {
        out.push(v);
    }
    out
}

/// Rewrites a raw listing into normal form.
///
/// Requires `p` nonempty with `p[0]` empty and `|p[s]| <= s`; block `s` then
/// consists of all extensions of `p[s]` of one length, strictly longer than
/// every string emitted before it (so the result is injective with strictly
/// increasing lengths across blocks, still bounded by the index).
pub fn normalize_pi(p: &[FiniteBitSet]) -> PiSeq {
    assert!(!p.is_empty(), "listing must be nonempty");
    assert!(p[0].is_empty(), "listing must start with the empty string");
    let mut strings = vec![p[0].clone()];
    let mut block_start = vec![0usize];
    for s in 1..p.len() {
        assert!(p[s].len() <= s, "entry {s} longer than its index");
        let t = (0..s).rev().find(|&t| p[t].is_prefix_of(&p[s])).expect("p[0] prefixes all");
        let last_len = strings.last().expect("nonempty").len();
        let lead_len = strings[block_start[t]].len();
        let l = (1 + last_len).max(1 + lead_len).saturating_sub(p[s].len());
        assert!(l < 48, "block of 2^{l} extensions exceeds desk scale");
        block_start.push(strings.len());
        for i in 0..(1usize << l) {
            strings.push(concat(&p[s], &binary_rep(i, l)));
        }
    }
    PiSeq { strings, block_start }
}

/// Number of earlier entries that are prefixes of entry `n` (reflexively on
/// the earlier side).  By injectivity and monotone lengths this also counts
/// all entries other than `n` itself that prefix it.
pub fn i_pi(pi: &PiSeq, n: usize) -> usize {
    (0..n).filter(|&m| pi.get(m).is_prefix_of(pi.get(n))).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> FiniteBitSet {
        FiniteBitSet::from_bools(&s.bytes().map(|b| b == b'1').collect::<Vec<_>>())
    }

    #[test]
    fn singleton_listing_is_fixed() {
        let pi = normalize_pi(&[bits("")]);
        assert_eq!(pi.strings(), &[bits("")]);
    }

    #[test]
    fn worked_three_entry_listing() {
        let pi = normalize_pi(&[bits(""), bits("1"), bits("0")]);
        assert_eq!(pi.strings(), &[bits(""), bits("1"), bits("00"), bits("01")]);
        let heights: Vec<usize> = (0..4).map(|n| i_pi(&pi, n)).collect();
        assert_eq!(heights, vec![0, 1, 1, 1]);
    }

    #[test]
    fn chains_pass_through_unchanged() {
        let p: Vec<FiniteBitSet> = (0..8).map(|n| bits(&"1".repeat(n))).collect();
        let pi = normalize_pi(&p);
        assert_eq!(pi.strings(), &p[..]);
        for n in 0..8 {
            assert_eq!(i_pi(&pi, n), n);
        }
    }

    #[test]
    fn lengths_injective_and_bounded() {
        let p = vec![bits(""), bits("0"), bits("01"), bits("1"), bits("011"), bits("0")];
        let pi = normalize_pi(&p);
        for n in 0..pi.len() {
            assert!(pi.get(n).len() <= n, "length bound at {n}");
            for m in 0..n {
                assert!(pi.get(m) != pi.get(n), "injective at {m},{n}");
                assert!(pi.get(m).len() <= pi.get(n).len(), "monotone at {m},{n}");
            }
        }
    }

    #[test]
    fn prefix_count_forms_agree() {
        let p = vec![bits(""), bits("0"), bits("01"), bits("1"), bits("011")];
        let pi = normalize_pi(&p);
        for n in 0..pi.len() {
            let strict: usize = (0..pi.len())
                .filter(|&m| m != n && pi.get(m).is_prefix_of(pi.get(n)))
                .count();
            assert_eq!(i_pi(&pi, n), strict);
        }
    }
}
