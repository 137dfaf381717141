use crate::bits::FiniteBitSet;
use crate::error::CoreError;
use num::bigint::BigUint;
use num::{One, Zero};

/// Code of a bit string: `2^{|s|} - 1 + sum_n 2^n s(n)`.
///
/// A bijection between bit strings and naturals: the binary digits of
/// `code + 1` are the string prepended with a leading 1. The empty string
/// codes to 0, `"0"` to 1, `"1"` to 2.
pub fn code_bits(s: &FiniteBitSet) -> BigUint {
    let mut bytes = Vec::with_capacity(s.words().len() * 8);
    for w in s.words() {
        bytes.extend_from_slice(&w.to_le_bytes());
    }
    BigUint::from_bytes_le(&bytes) + (BigUint::one() << s.len()) - BigUint::one()
}

/// Inverse of [`code_bits`].
pub fn decode_bits(x: &BigUint) -> FiniteBitSet {
    let v = x + BigUint::one();
    let len = (v.bits() - 1) as usize;
    let digits = v - (BigUint::one() << len);
    let bytes = digits.to_bytes_le();
    let mut words = vec![0u64; bytes.len().div_ceil(8)];
    for (i, b) in bytes.iter().enumerate() {
        words[i / 8] |= (*b as u64) << (8 * (i % 8));
    }
    FiniteBitSet::from_words(words, len)
}

fn powers(base: &BigUint, upto: usize) -> Vec<BigUint> {
    let mut p = Vec::with_capacity(upto + 1);
    p.push(BigUint::one());
    for i in 0..upto {
        let next = &p[i] * base;
        p.push(next);
    }
    p
}

/// Code of an arity-`n` tuple of naturals.
///
/// A bijection between arity-`n` tuples and naturals that is monotone in the
/// tuple maximum: tuples of maximum exactly `m` occupy `[m^n, (m+1)^n)`, in
/// lexicographic order within the block. Consequently `code < (m+1)^n` holds
/// iff the maximum is at most `m`, and arity 1 is the identity.
pub fn code_tuple(tuple: &[u64]) -> Result<BigUint, CoreError> {
    let n = tuple.len();
    if n == 0 {
        return Err(CoreError::ZeroArity);
    }
    let m = *tuple.iter().max().expect("nonempty");
    let mb = BigUint::from(m);
    let mp1 = &mb + BigUint::one();
    let pow_m = powers(&mb, n);
    let pow_mp1 = powers(&mp1, n);

    // Rank within the block of tuples with maximum exactly m. Before the
    // maximum first appears, a digit d < m heads (m+1)^rem - m^rem suffixes;
    // afterwards every digit heads (m+1)^rem.
    let mut rank = BigUint::zero();
    let mut seen = false;
    for (j, &d) in tuple.iter().enumerate() {
        let rem = n - 1 - j;
        if seen {
            rank += BigUint::from(d) * &pow_mp1[rem];
        } else {
            let cnt0 = &pow_mp1[rem] - &pow_m[rem];
            if d < m {
                rank += BigUint::from(d) * &cnt0;
            } else {
                rank += &mb * &cnt0;
                seen = true;
            }
        }
    }
    Ok(&pow_m[n] + rank)
}

/// [`code_tuple`] in machine words: `None` for the empty tuple or when the
/// code overflows.
pub fn code_tuple_u64(tuple: &[u64]) -> Option<u64> {
    let n = tuple.len();
    if n == 0 {
        return None;
    }
    let m = *tuple.iter().max().expect("nonempty") as u128;
    let mut pow_m = vec![1u128; n + 1];
    let mut pow_mp1 = vec![1u128; n + 1];
    for i in 0..n {
        pow_m[i + 1] = pow_m[i].checked_mul(m)?;
        pow_mp1[i + 1] = pow_mp1[i].checked_mul(m + 1)?;
    }
    let mut code = pow_m[n];
    let mut seen = false;
    for (j, &d) in tuple.iter().enumerate() {
        let rem = n - 1 - j;
        if seen {
            code = code.checked_add((d as u128).checked_mul(pow_mp1[rem])?)?;
        } else {
            let cnt0 = pow_mp1[rem] - pow_m[rem];
            let head = if (d as u128) < m { d as u128 } else { m };
            code = code.checked_add(head.checked_mul(cnt0)?)?;
            seen = d as u128 == m;
        }
    }
    u64::try_from(code).ok()
}

/// Inverse of [`code_tuple`] at the given arity.
pub fn decode_tuple(code: &BigUint, n: usize) -> Result<Vec<u64>, CoreError> {
    if n == 0 {
        return Err(CoreError::ZeroArity);
    }
    let m_big = code.nth_root(n as u32);
    let m = u64::try_from(&m_big).map_err(|_| CoreError::ComponentTooLarge)?;
    let mb = BigUint::from(m);
    let mp1 = &mb + BigUint::one();
    let pow_m = powers(&mb, n);
    let pow_mp1 = powers(&mp1, n);

    let mut r = code - &pow_m[n];
    let mut seen = false;
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let rem = n - 1 - j;
        if seen {
            let q = &r / &pow_mp1[rem];
            r -= &q * &pow_mp1[rem];
            out.push(u64::try_from(&q).expect("digit bounded by m"));
        } else {
            let cnt0 = &pow_mp1[rem] - &pow_m[rem];
            let low_block = &mb * &cnt0;
            if r < low_block {
                let q = &r / &cnt0;
                r -= &q * &cnt0;
                out.push(u64::try_from(&q).expect("digit below m"));
            } else {
                r -= low_block;
                out.push(m);
                seen = true;
            }
        }
    }
    debug_assert!(r.is_zero());
    Ok(out)
}
