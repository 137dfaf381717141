use crate::bits::FiniteBitSet;
use crate::error::CoreError;
use num::bigint::BigInt;
use num::rational::BigRational;

/// Exact rational; all density values and comparisons use this type.
pub type Rational = BigRational;

/// Reduced rational from machine words.
pub fn ratio_u64(num: u64, den: u64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Windowed upper density: the maximum over window lengths `l` in the closed
/// range `[a, b]` of `|S intersect [0, l)| / l`, computed exactly.
///
/// Both endpoints are included. Windows reaching past the known prefix are
/// rejected rather than extrapolated.
pub fn window_density(s: &FiniteBitSet, a: usize, b: usize) -> Result<Rational, CoreError> {
    if a == 0 || a > b || b > s.len() {
        return Err(CoreError::BadWindow { a, b, len: s.len() });
    }
    let mut count: u64 = 0;
    let mut best_num: u64 = 0;
    let mut best_den: u64 = 1;
    for l in 1..=b {
        if s.get(l - 1) {
            count += 1;
        }
        if l >= a && (count as u128) * (best_den as u128) > (best_num as u128) * (l as u128) {
            best_num = count;
            best_den = l as u64;
        }
    }
    Ok(ratio_u64(best_num, best_den))
}
