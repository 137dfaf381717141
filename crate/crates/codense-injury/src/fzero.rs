//! The closed-form initial sequence the construction mutates away from.
//!
//! At position `⟨i, ⟨l, k⟩⟩` the sequence holds the code of the length
//! `l + 1` string read off a width `l + 1` digit of `k`, staggered by column
//! so that any finite tuple of same-length strings is realized jointly on a
//! single arithmetic progression of second coordinates.

use codense_core::{code_bits, decode_bits, pair, unpair, unpair_big, FiniteBitSet, Rational};
use num::bigint::BigUint;
use num::{One, Zero};

/// Value at machine-sized positions; widths stay far below word size here.
pub fn f0_small(x: u64) -> u64 {
    let (i, y) = unpair(x);
    let (l, k) = unpair(y);
    let w = l + 1;
    assert!(w < 63, "width beyond the small path");
    let shift = i.checked_mul(w).expect("column times width fits");
    let quot = if shift >= 64 { 0 } else { k >> shift };
    let rem = quot & ((1u64 << w) - 1);
    rem + (1u64 << w) - 1
}

/// Value at any materializable position.
pub fn f0_at(x: &BigUint) -> BigUint {
    let (i, y) = unpair_big(x);
    let (l, k) = unpair_big(&y);
    let w = l + 1;
    assert!(w <= 1 << 26, "coded string too wide to materialize");
    let shift = i.checked_mul(w).expect("column times width fits");
    let quot = if shift >= k.bits() { BigUint::zero() } else { &k >> shift };
    let rem = if w >= quot.bits() {
        quot
    } else {
        quot & ((BigUint::one() << w) - BigUint::one())
    };
    rem + (BigUint::one() << w) - BigUint::one()
}

/// Width of the string coded at `x`: one more than the first coordinate of
/// the second coordinate of `x`.
pub fn f0_width(x: &BigUint) -> u64 {
    let (_, y) = unpair_big(x);
    let (l, _) = unpair_big(&y);
    l + 1
}

/// The string coded at a materializable position.
pub fn f0_string(x: &BigUint) -> FiniteBitSet {
    decode_bits(&f0_at(x))
}

/// Period, in second coordinates `y`, of the value pattern across the first
/// `n` columns at width `w`.
pub fn joint_preimage_period(n: u64, w: u64) -> u64 {
    1u64.checked_shl((w * (n + 1)).try_into().expect("desk-scale period"))
        .expect("desk-scale period")
}

/// All `y < bound` at which every column `j < n` codes `sigmas[j]`.
///
/// The strings must be nonempty, equal length, and few enough that positions
/// stay machine sized.
pub fn joint_preimage_members(sigmas: &[FiniteBitSet], bound: u64) -> Vec<u64> {
    assert!(!sigmas.is_empty(), "need at least one target string");
    let w = sigmas[0].len();
    assert!(w >= 1, "target strings must be nonempty");
    assert!(sigmas.iter().all(|s| s.len() == w), "target strings must share a length");
    let codes: Vec<u64> = sigmas
        .iter()
        .map(|s| u64::try_from(&code_bits(s)).expect("desk-scale code"))
        .collect();
    (0..bound)
        .filter(|&y| {
            codes
                .iter()
                .enumerate()
                .all(|(j, &c)| f0_small(pair(j as u64, y)) == c)
        })
        .collect()
}

/// Fraction of second coordinates realizing all `n` targets jointly: one per
/// period window.
pub fn joint_preimage_density(n: u64, w: u64) -> Rational {
    codense_core::ratio_u64(1, joint_preimage_period(n, w))
}

/// Least `y` at which column `i` codes `sigma`.  Width-`w` values occur only
/// at `y = ⟨w − 1, k⟩`, and the digit at place `i` repeats with period
/// `2^{w(i+1)}` in `k`, so one sweep of `k` suffices.
pub fn least_column_preimage(i: u64, sigma: &FiniteBitSet) -> u64 {
    let w = sigma.len() as u64;
    assert!(w >= 1, "target string must be nonempty");
    let code = u64::try_from(&code_bits(sigma)).expect("desk-scale code");
    let period = joint_preimage_period(i, w);
    (0..period)
        .map(|k| pair(w - 1, k))
        .find(|&y| f0_small(pair(i, y)) == code)
        .expect("every width-w string occurs once per k-period")
}

#[cfg(test)]
mod tests {
    use super::*;
    use codense_core::pair_big;

    fn bits(s: &str) -> FiniteBitSet {
        FiniteBitSet::from_bools(&s.bytes().map(|b| b == b'1').collect::<Vec<_>>())
    }

    #[test]
    fn base_value_codes_the_zero_string() {
        assert_eq!(f0_small(0), 1);
        assert_eq!(f0_string(&BigUint::from(0u32)), bits("0"));
    }

    #[test]
    fn small_and_big_paths_agree() {
        for x in 0..5000u64 {
            assert_eq!(BigUint::from(f0_small(x)), f0_at(&BigUint::from(x)), "x={x}");
        }
    }

    #[test]
    fn width_matches_coded_string() {
        for x in 0..2000u64 {
            let b = BigUint::from(x);
            assert_eq!(f0_width(&b) as usize, f0_string(&b).len(), "x={x}");
        }
    }

    #[test]
    fn column_values_are_periodic_in_k() {
        for i in 0..3u64 {
            for l in 0..3u64 {
                let w = l + 1;
                let period = 1u64 << (w * (i + 1));
                for k in 0..64u64 {
                    let a = f0_small(pair(i, pair(l, k)));
                    let b = f0_small(pair(i, pair(l, k + period)));
                    assert_eq!(a, b, "i={i} l={l} k={k}");
                }
            }
        }
    }

    #[test]
    fn joint_members_hit_once_per_window() {
        let sigmas = [bits("10"), bits("01")];
        let period = joint_preimage_period(2, 2);
        let members = joint_preimage_members(&sigmas, 4 * period);
        assert_eq!(members.len(), 4);
        for (m, &y) in members.iter().enumerate() {
            assert!(y >= m as u64 * period && y < (m as u64 + 1) * period);
        }
    }

    #[test]
    fn canonical_column_preimage_is_the_digit_shift() {
        // Least y coding sigma at column i places the bits-number at digit i:
        // y = ⟨w − 1, B·2^{iw}⟩.
        for i in 0..3u64 {
            for sigma in [bits("1"), bits("01"), bits("110")] {
                let w = sigma.len() as u64;
                let b = code_bits(&sigma) - ((BigUint::one() << w) - BigUint::one());
                let bb = u64::try_from(&b).unwrap();
                let y = least_column_preimage(i, &sigma);
                assert_eq!(BigUint::from(y), pair_big(w - 1, &BigUint::from(bb << (i * w))));
            }
        }
    }
}
