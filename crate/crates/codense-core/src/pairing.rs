use num::bigint::BigUint;
use num::One;

/// Monotone pairing `(i, n) -> 2^{i+1} n + 2^i - 1`.
///
/// Equivalently `(0, n) = 2n` and `(i+1, n) = 2 (i, n) + 1`. Strictly monotone
/// in each argument; column `i` occupies the residues `2^i - 1 (mod 2^{i+1})`.
///
/// Panics if the result does not fit in `u64`; use [`pair_big`] beyond that.
pub fn pair(i: u64, n: u64) -> u64 {
    assert!(i < 127, "column index {i} out of range");
    let v = (1u128 << (i + 1)) * n as u128 + (1u128 << i) - 1;
    u64::try_from(v).expect("paired value exceeds u64")
}

/// Inverse of [`pair`].
pub fn unpair(z: u64) -> (u64, u64) {
    let v = z as u128 + 1;
    let i = v.trailing_zeros();
    (i as u64, (v >> (i + 1)) as u64)
}

/// [`pair`] for arbitrary-size row positions. Column indices stay machine
/// words: every use keeps `i` small while `n` grows without bound.
pub fn pair_big(i: u64, n: &BigUint) -> BigUint {
    (n << (i + 1)) + ((BigUint::one() << i) - BigUint::one())
}

/// Inverse of [`pair_big`].
pub fn unpair_big(z: &BigUint) -> (u64, BigUint) {
    let v = z + BigUint::one();
    let i = v.trailing_zeros().expect("v is positive");
    (i, v >> (i + 1))
}

/// Position of row `n` within column `i`, i.e. `pair(i, n)` as a big integer.
pub fn column_position(i: u64, n: &BigUint) -> BigUint {
    pair_big(i, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pinned_values() {
        assert_eq!(pair(0, 0), 0);
        assert_eq!(pair(0, 5), 10);
        assert_eq!(pair(2, 0), 3);
    }

    #[test]
    fn recurrence() {
        for i in 0..6 {
            for n in 0..50 {
                let expected = if i == 0 { 2 * n } else { 2 * pair(i - 1, n) + 1 };
                assert_eq!(pair(i, n), expected);
            }
        }
    }

    #[test]
    fn big_matches_small() {
        for i in 0..10u64 {
            for n in 0..100u64 {
                let big = pair_big(i, &BigUint::from(n));
                assert_eq!(big, BigUint::from(pair(i, n)));
                let (bi, bn) = unpair_big(&big);
                assert_eq!((bi, bn), (i, BigUint::from(n)));
            }
        }
    }

    #[test]
    fn column_residues() {
        for i in 0..5u64 {
            for n in 0..40u64 {
                let z = pair(i, n);
                assert_eq!(z % (1 << (i + 1)), (1 << i) - 1);
            }
        }
    }
}
