use crate::error::LayoutError;
use codense_core::FiniteBitSet;

/// `2^r` concatenated copies of a nonempty string.
pub fn mod_rep(sigma: &FiniteBitSet, r: u32) -> Result<FiniteBitSet, LayoutError> {
    if sigma.is_empty() {
        return Err(LayoutError::EmptyBase);
    }
    let copies = 1usize.checked_shl(r).ok_or(LayoutError::RepetitionTooLong)?;
    if sigma.len().checked_mul(copies).is_none_or(|bits| bits > (1 << 26)) {
        return Err(LayoutError::RepetitionTooLong);
    }
    Ok(sigma.repeat(copies))
}

/// Strict-majority decoder: bit `x` of the result is 1 exactly when more than
/// `2^{r-1}` of the `2^r` copies vote 1 at `x`.
pub fn mod_rep_inv(tau: &FiniteBitSet, r: u32) -> Result<FiniteBitSet, LayoutError> {
    let copies = 1usize.checked_shl(r).ok_or(LayoutError::RepetitionTooLong)?;
    if tau.len() % copies != 0 {
        return Err(LayoutError::LengthNotDivisible(tau.len(), r));
    }
    let l = tau.len() / copies;
    let threshold = copies / 2; // strict majority: votes > 2^{r-1}
    let mut out = FiniteBitSet::zeros(l);
    for x in 0..l {
        let votes = (0..copies).filter(|k| tau.get(x + k * l)).count();
        if votes > threshold {
            out.set(x, true);
        }
    }
    Ok(out)
}
