//! Exact arithmetic for string lengths that outgrow any in-memory integer.
//!
//! Stage `s` of the construction extends every column by a string of length
//! `⟨c, l⟩ = 2^{c+1}·l + 2^c − 1` where `c = 2^{s+1} − 2`.  From roughly a
//! dozen stages on that value has more bits than fit in memory, so lengths
//! are kept either as a plain integer or in the pair form `(c, l)`, and all
//! comparisons are done exactly on whichever forms the two sides have.

use num::bigint::BigUint;
use num::{One, Zero};
use serde_json::{json, Value};
use std::cmp::Ordering;

use crate::error::InjuryError;

/// Pair-form values at or below this many bits collapse to plain integers.
pub const CANON_BITS: u64 = 4096;

/// A string length: either a plain integer or the pair form `2^{c+1}l + 2^c − 1`
/// kept symbolically because the value itself would not fit in memory.
#[derive(Clone, Debug)]
pub enum StrLen {
    Fin(BigUint),
    Hat { c: BigUint, l: BigUint },
}

/// Number of bits of `2l + 1`.
fn odd_mantissa_bits(l: &BigUint) -> u64 {
    (l << 1u32 | BigUint::one()).bits()
}

impl StrLen {
    pub fn fin(v: BigUint) -> Self {
        StrLen::Fin(v)
    }

    /// Builds `⟨c, l⟩` for `c = 2^{stage+1} − 2`, collapsing to a plain
    /// integer whenever the value is small enough to hold.
    pub fn hat(stage: u32, l: &BigUint) -> Self {
        let c = (BigUint::one() << (stage as u64 + 1)) - 2u32;
        // Value has exactly c + bits(2l+1) bits (l >= 1 in every use).
        assert!(!l.is_zero(), "pair-form length needs a positive second coordinate");
        if &c + odd_mantissa_bits(l) <= BigUint::from(CANON_BITS) {
            let c64 = u64::try_from(&c).expect("small exponent");
            let value = (((l << 1u32) | BigUint::one()) << c64) - BigUint::one();
            StrLen::Fin(value)
        } else {
            StrLen::Hat { c, l: l.clone() }
        }
    }

    pub fn as_fin(&self) -> Option<&BigUint> {
        match self {
            StrLen::Fin(v) => Some(v),
            StrLen::Hat { .. } => None,
        }
    }

    /// Exact number of bits of the value.
    pub fn bit_len(&self) -> BigUint {
        match self {
            StrLen::Fin(v) => BigUint::from(v.bits()),
            // 2^c(2l+1) − 1 is never a power of two for l >= 1, so subtracting
            // one does not drop a bit.
            StrLen::Hat { c, l } => c + odd_mantissa_bits(l),
        }
    }

    /// The value minus one, saturated to `u64::MAX`; used as a certified
    /// lower exponent for positions of magnitude at least `2^{len − 1}`.
    pub fn value_minus_one_sat(&self) -> u64 {
        match self {
            StrLen::Fin(v) => {
                u64::try_from(v).map_or(u64::MAX, |x| x.saturating_sub(1))
            }
            StrLen::Hat { .. } => u64::MAX,
        }
    }

    pub fn cmp_big(&self, other: &BigUint) -> Ordering {
        match self {
            StrLen::Fin(v) => v.cmp(other),
            StrLen::Hat { c, l } => {
                let bits = c + odd_mantissa_bits(l);
                match bits.cmp(&BigUint::from(other.bits())) {
                    Ordering::Equal => {
                        // Equal bit counts force c below the other side's
                        // bit count, so the shift is materializable.
                        let c64 = u64::try_from(c).expect("exponent bounded by a held integer");
                        let value = (((l << 1u32) | BigUint::one()) << c64) - BigUint::one();
                        value.cmp(other)
                    }
                    o => o,
                }
            }
        }
    }

    pub fn cmp_len(&self, other: &StrLen) -> Ordering {
        match (self, other) {
            (StrLen::Fin(a), StrLen::Fin(b)) => a.cmp(b),
            (StrLen::Fin(a), _) => other.cmp_big(a).reverse(),
            (_, StrLen::Fin(b)) => self.cmp_big(b),
            (StrLen::Hat { c: ca, l: la }, StrLen::Hat { c: cb, l: lb }) => {
                let ba = ca + odd_mantissa_bits(la);
                let bb = cb + odd_mantissa_bits(lb);
                match ba.cmp(&bb) {
                    Ordering::Equal => {
                        // Compare 2^{ca}(2la+1) against 2^{cb}(2lb+1); the
                        // exponent gap equals the mantissa bit gap, which is
                        // machine sized once the totals agree.
                        let ma = (la << 1u32) | BigUint::one();
                        let mb = (lb << 1u32) | BigUint::one();
                        match ca.cmp(cb) {
                            Ordering::Equal => ma.cmp(&mb),
                            Ordering::Less => {
                                let d = u64::try_from(&(cb - ca)).expect("gap is mantissa sized");
                                ma.cmp(&(mb << d))
                            }
                            Ordering::Greater => {
                                let d = u64::try_from(&(ca - cb)).expect("gap is mantissa sized");
                                (ma << d).cmp(&mb)
                            }
                        }
                    }
                    o => o,
                }
            }
        }
    }

    /// The exact value as a machine index, or an error naming the overflow.
    pub fn to_usize(&self, what: &'static str) -> Result<usize, InjuryError> {
        let too_big = |bits: &BigUint| InjuryError::Unrepresentable {
            what,
            bits: u64::try_from(bits).unwrap_or(u64::MAX),
        };
        match self {
            StrLen::Fin(v) => usize::try_from(v).map_err(|_| too_big(&self.bit_len())),
            StrLen::Hat { .. } => Err(too_big(&self.bit_len())),
        }
    }

    pub fn describe(&self) -> Value {
        match self {
            StrLen::Fin(v) => {
                if v.bits() <= 128 {
                    json!(v.to_string())
                } else {
                    json!({ "bits": v.bits().to_string() })
                }
            }
            StrLen::Hat { c, l } => json!({
                "exp": c.to_string(),
                "mul": l.to_string(),
            }),
        }
    }
}

impl PartialEq for StrLen {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_len(other) == Ordering::Equal
    }
}
impl Eq for StrLen {}
impl PartialOrd for StrLen {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_len(other))
    }
}
impl Ord for StrLen {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_len(other)
    }
}
