use crate::error::CodecError;
use crate::idem::{idempotent_maps, is_idempotent, IdempotentMap};
use crate::index::split_index;
use crate::theta::Theta;
use codense_core::{code_tuple_u64, FiniteBitSet};

/// Largest value lent to slot `x`: `max` of `sigma(y)` over the slots `y`
/// that `q` sends to `x`, or `None` when no slot does.
///
/// Under an idempotent `q` the result is `Some` exactly when `q(x) = x`
/// (a slot always lends to itself if it lends at all).
pub fn borrow_bound(q: &IdempotentMap, sigma: &[u64], x: usize) -> Result<Option<u64>, CodecError> {
    if q.arity() != sigma.len() {
        return Err(CodecError::ArityMismatch { left: q.arity(), right: sigma.len() });
    }
    if x >= sigma.len() {
        return Err(CodecError::MapValueOutOfRange { value: x, arity: sigma.len() });
    }
    Ok((0..sigma.len()).filter(|&y| q.apply(y) == x).map(|y| sigma[y]).max())
}

/// One block of the encoding: bit `x` is set when `sigma(x) > tau(x)` and
/// the whole of `tau` sits below what slot `x` borrows.
pub fn encode_one(
    tau: &[u64],
    q: &IdempotentMap,
    sigma: &[u64],
) -> Result<FiniteBitSet, CodecError> {
    let n = sigma.len();
    if n == 0 {
        return Err(CodecError::ZeroArity);
    }
    if tau.len() != n {
        return Err(CodecError::ArityMismatch { left: tau.len(), right: n });
    }
    if q.arity() != n {
        return Err(CodecError::ArityMismatch { left: q.arity(), right: n });
    }
    let tau_max = *tau.iter().max().expect("nonempty");
    let mut out = FiniteBitSet::zeros(n);
    for x in 0..n {
        if sigma[x] > tau[x] && borrow_bound(q, sigma, x)?.is_some_and(|b| tau_max < b) {
            out.set(x, true);
        }
    }
    Ok(out)
}

/// Block at a packed index: splits the index into its tuple and map parts
/// and applies [`encode_one`]; a non-idempotent map part yields the empty
/// vector.
pub fn encode_at(sigma: &[u64], s: u64) -> Result<FiniteBitSet, CodecError> {
    let n = sigma.len();
    if n == 0 {
        return Err(CodecError::ZeroArity);
    }
    let (tau, q) = split_index(s, n)?;
    if !is_idempotent(&q) {
        return Ok(FiniteBitSet::zeros(n));
    }
    encode_one(&tau, &IdempotentMap::new(q)?, sigma)
}

/// Full encoding: the family of [`encode_one`] blocks over every packed
/// index. Only indices below `n^n m^n` (with `m = max sigma`) can be
/// nonempty, so the support is finite and the enumeration stops there.
pub fn encode(sigma: &[u64]) -> Result<Theta, CodecError> {
    let n = sigma.len();
    let theta = Theta::new(n)?;
    let m = *sigma.iter().max().expect("nonempty");
    if m == 0 {
        return Ok(theta);
    }
    match (n as u64).checked_pow(n as u32) {
        Some(nn) => encode_bulk(sigma, m, nn),
        // The packed index overflows a word at the very first block, which
        // is nonempty whenever m > 0.
        None => Err(CodecError::IndexTooLarge),
    }
}

/// Word-arithmetic route for [`encode`]: the lending profile of each map is
/// fixed by `sigma`, so every block is two mask intersections instead of a
/// [`encode_one`] call, and the support is built in one pass.
fn encode_bulk(sigma: &[u64], m: u64, nn: u64) -> Result<Theta, CodecError> {
    let n = sigma.len();
    let maps = idempotent_maps(n);
    // lent[qi * n + x] is one past the largest value lent to x, 0 when the
    // map sends nothing there.
    let mut lent = vec![0u64; maps.len() * n];
    let mut qranks = vec![0u64; maps.len()];
    for (qi, q) in maps.iter().enumerate() {
        for y in 0..n {
            let cell = &mut lent[qi * n + q.apply(y)];
            *cell = (*cell).max(sigma[y].saturating_add(1));
        }
        qranks[qi] = q.slots().iter().rev().fold(0u64, |acc, &v| acc * n as u64 + v as u64);
    }
    // A block needs max tau < (a borrowed value <= m), so tau ranges over
    // {0, .., m-1}^n; non-idempotent maps encode nothing.
    let mut entries: Vec<(u64, u64)> = Vec::new();
    let mut tau = vec![0u64; n];
    loop {
        let tmax = *tau.iter().max().expect("nonempty");
        let mut gt = 0u64;
        for x in 0..n {
            if sigma[x] > tau[x] {
                gt |= 1 << x;
            }
        }
        if gt != 0 {
            let mut tc = None;
            for (qi, &qr) in qranks.iter().enumerate() {
                let mut mask = 0u64;
                for x in 0..n {
                    if lent[qi * n + x] > tmax + 1 {
                        mask |= 1 << x;
                    }
                }
                mask &= gt;
                if mask != 0 {
                    let code = match tc {
                        Some(c) => c,
                        None => *tc.insert(
                            code_tuple_u64(&tau).ok_or(CodecError::IndexTooLarge)?,
                        ),
                    };
                    let s = code
                        .checked_mul(nn)
                        .and_then(|v| v.checked_add(qr))
                        .ok_or(CodecError::IndexTooLarge)?;
                    entries.push((s, mask));
                }
            }
        }
        let mut i = 0;
        while i < n {
            tau[i] += 1;
            if tau[i] < m {
                break;
            }
            tau[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
    }
    entries.sort_unstable_by_key(|&(s, _)| s);
    Ok(Theta::from_sorted_masks(n, &entries))
}

/// Componentwise minimum.
pub fn cwise_min(a: &[u64], b: &[u64]) -> Result<Vec<u64>, CodecError> {
    if a.len() != b.len() {
        return Err(CodecError::ArityMismatch { left: a.len(), right: b.len() });
    }
    Ok(a.iter().zip(b).map(|(&x, &y)| x.min(y)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theta::height;

    #[test]
    fn borrowing_follows_the_map() {
        let id = IdempotentMap::identity(2);
        let pool = IdempotentMap::new(vec![0, 0]).unwrap();
        assert_eq!(borrow_bound(&id, &[1, 3], 0).unwrap(), Some(1));
        assert_eq!(borrow_bound(&id, &[1, 3], 1).unwrap(), Some(3));
        assert_eq!(borrow_bound(&pool, &[1, 3], 0).unwrap(), Some(3));
        assert_eq!(borrow_bound(&pool, &[1, 3], 1).unwrap(), None);
    }

    #[test]
    fn single_blocks() {
        let id = IdempotentMap::identity(2);
        let pool = IdempotentMap::new(vec![0, 0]).unwrap();
        assert_eq!(encode_one(&[0, 0], &id, &[2, 0]).unwrap().to_string(), "10");
        assert_eq!(encode_one(&[0, 2], &pool, &[1, 3]).unwrap().to_string(), "10");
        // The reference maximum caps every borrowed value.
        assert_eq!(encode_one(&[3, 3], &id, &[2, 3]).unwrap().card(), 0);
    }

    #[test]
    fn zero_tuple_encodes_to_nothing() {
        assert!(encode(&[0, 0, 0]).unwrap().is_empty());
    }

    #[test]
    fn width_one_support() {
        // Width 1: the only map is the identity, index s codes tau = (s).
        let theta = encode(&[2]).unwrap();
        let entries: Vec<(u64, String)> =
            theta.support().map(|(s, b)| (s, b.to_string())).collect();
        assert_eq!(entries, vec![(0, "1".into()), (1, "1".into())]);
    }

    #[test]
    fn indexed_view_agrees_with_the_support_walk() {
        let sigma = [2, 0, 1];
        let theta = encode(&sigma).unwrap();
        for s in 0..200 {
            assert_eq!(encode_at(&sigma, s).unwrap(), theta.get(s), "index {s}");
        }
    }

    #[test]
    fn encoded_height_is_the_maximum_value() {
        for sigma in [vec![0u64, 0], vec![1, 0], vec![2, 3], vec![5, 1], vec![4, 4]] {
            let theta = encode(&sigma).unwrap();
            assert_eq!(height(&theta), *sigma.iter().max().unwrap());
        }
    }

    #[test]
    fn componentwise_minimum() {
        assert_eq!(cwise_min(&[3, 1], &[2, 5]).unwrap(), vec![2, 1]);
        assert!(cwise_min(&[1], &[1, 2]).is_err());
    }

    #[test]
    fn bulk_route_matches_the_block_by_block_route() {
        use crate::index::code_index_u64;

        // Independent slow construction straight from the definitions.
        fn literal(sigma: &[u64]) -> Theta {
            let n = sigma.len();
            let mut theta = Theta::new(n).unwrap();
            let m = *sigma.iter().max().unwrap();
            if m == 0 {
                return theta;
            }
            let maps = idempotent_maps(n);
            let mut tau = vec![0u64; n];
            loop {
                for q in &maps {
                    let bits = encode_one(&tau, q, sigma).unwrap();
                    if bits.card() > 0 {
                        theta.set(code_index_u64(&tau, q.slots()).unwrap(), bits).unwrap();
                    }
                }
                let mut i = 0;
                while i < n {
                    tau[i] += 1;
                    if tau[i] < m {
                        break;
                    }
                    tau[i] = 0;
                    i += 1;
                }
                if i == n {
                    return theta;
                }
            }
        }

        let mut cases: Vec<Vec<u64>> = vec![vec![3, 0, 2, 1], vec![2, 4, 1, 0, 3]];
        for n in 1..=3usize {
            let mut cur = vec![0u64; n];
            loop {
                cases.push(cur.clone());
                let mut i = 0;
                while i < n {
                    cur[i] += 1;
                    if cur[i] <= 3 {
                        break;
                    }
                    cur[i] = 0;
                    i += 1;
                }
                if i == n {
                    break;
                }
            }
        }
        for sigma in cases {
            assert_eq!(encode(&sigma).unwrap(), literal(&sigma), "{sigma:?}");
        }
    }
}
