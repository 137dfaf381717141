use crate::error::CodecError;
use codense_core::{code_tuple, decode_tuple};
use num::bigint::BigUint;
use num::ToPrimitive;

/// Base-`n` value of a self-map of `{0, .., n-1}`: `sum q(i) n^i`.
///
/// Ranges over exactly `[0, n^n)` as `q` ranges over all maps, so it packs
/// into a code index without colliding with the tuple part.
pub fn rank_map(q: &[usize]) -> Result<BigUint, CodecError> {
    let n = q.len();
    if n == 0 {
        return Err(CodecError::ZeroArity);
    }
    let mut rank = BigUint::ZERO;
    for &v in q.iter().rev() {
        if v >= n {
            return Err(CodecError::MapValueOutOfRange { value: v, arity: n });
        }
        rank = rank * n + v;
    }
    Ok(rank)
}

/// Inverse of [`rank_map`]: the `n` base-`n` digits of `rank`, least
/// significant first. Panics if `rank >= n^n` (the digits would not fit).
pub fn unrank_map(rank: &BigUint, n: usize) -> Vec<usize> {
    assert!(n > 0, "arity must be positive");
    let big_n = BigUint::from(n);
    let mut rem = rank.clone();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let digit = (&rem % &big_n).to_usize().expect("digit below n");
        out.push(digit);
        rem /= &big_n;
    }
    assert!(rem == BigUint::ZERO, "rank out of range for arity {n}");
    out
}

/// Joint code of a reference tuple and a borrowing map:
/// `code_tuple(tau) * n^n + rank_map(q)`.
///
/// Since `code_tuple` sorts tuples by their maximum first, the joint code is
/// below `n^n (m+1)^n` exactly when `max tau <= m`.
pub fn code_index(tau: &[u64], q: &[usize]) -> Result<BigUint, CodecError> {
    if tau.len() != q.len() {
        return Err(CodecError::ArityMismatch { left: tau.len(), right: q.len() });
    }
    let n = tau.len();
    let rank = rank_map(q)?;
    let tuple = code_tuple(tau).map_err(|_| CodecError::ZeroArity)?;
    Ok(tuple * BigUint::from(n).pow(n as u32) + rank)
}

/// [`code_index`] forced into a machine word.
pub fn code_index_u64(tau: &[u64], q: &[usize]) -> Result<u64, CodecError> {
    code_index(tau, q)?.to_u64().ok_or(CodecError::IndexTooLarge)
}

/// Inverse of [`code_index`] on machine-word indices.
pub fn split_index(s: u64, n: usize) -> Result<(Vec<u64>, Vec<usize>), CodecError> {
    if n == 0 {
        return Err(CodecError::ZeroArity);
    }
    let modulus = BigUint::from(n).pow(n as u32);
    let s = BigUint::from(s);
    let rank = &s % &modulus;
    let tuple = s / &modulus;
    let tau = decode_tuple(&tuple, n).map_err(|_| CodecError::ZeroArity)?;
    Ok((tau, unrank_map(&rank, n)))
}
