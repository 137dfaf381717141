//! Positions in the master domain, at machine scale or beyond.
//!
//! Column extensions place elements at positions around `2^{width}` for the
//! stage's extension width, which stops being materializable after a handful
//! of stages.  Such a position is kept structurally, tagged with the stage
//! and column that created it: distinct tags are provably distinct numbers,
//! and every tag is provably larger than any held integer the construction
//! compares it against.  Each comparison against a held integer is certified
//! through a saturated lower exponent rather than assumed.

use num::bigint::BigUint;
use serde_json::{json, Value};
use std::cmp::Ordering;
use std::rc::Rc;

use crate::error::InjuryError;
use crate::scale::StrLen;
use crate::symstr::SymStr;

/// A column-extension position too large to materialize.
#[derive(Clone, Debug)]
pub struct ExtPos {
    pub stage: u32,
    pub col: u64,
    /// Width of the extension string placed at this position.
    pub width: StrLen,
    /// The string this position codes under the evolving sequence.
    pub value: SymStr,
    /// Certified bound: the position is at least `2^{lb2}` (saturating).
    pub lb2: u64,
}

/// A position: a held integer, or a structural column-extension tag.
#[derive(Clone, Debug)]
pub enum SymPos {
    Fin(BigUint),
    Ext(Rc<ExtPos>),
}

impl SymPos {
    pub fn fin(v: BigUint) -> Self {
        SymPos::Fin(v)
    }

    pub fn as_fin(&self) -> Option<&BigUint> {
        match self {
            SymPos::Fin(v) => Some(v),
            SymPos::Ext(_) => None,
        }
    }

    /// Exact order against a held integer; errors if the structural bound
    /// cannot certify the answer (never reachable for in-range queries).
    pub fn cmp_big(&self, other: &BigUint) -> Result<Ordering, InjuryError> {
        match self {
            SymPos::Fin(v) => Ok(v.cmp(other)),
            SymPos::Ext(e) => {
                if e.lb2 >= other.bits() {
                    Ok(Ordering::Greater)
                } else {
                    Err(InjuryError::Uncertified {
                        left: format!("extension position (stage {}, column {})", e.stage, e.col),
                        right: format!("{} bit integer", other.bits()),
                    })
                }
            }
        }
    }

    pub fn is_below(&self, bound: &BigUint) -> Result<bool, InjuryError> {
        Ok(self.cmp_big(bound)? == Ordering::Less)
    }

    pub fn describe(&self) -> Value {
        match self {
            SymPos::Fin(v) => {
                if v.bits() <= 128 {
                    json!(v.to_string())
                } else {
                    json!({ "bits": v.bits().to_string() })
                }
            }
            SymPos::Ext(e) => json!({
                "stage": e.stage,
                "column": e.col,
                "bits_over": e.lb2.to_string(),
            }),
        }
    }
}

/// Structural identity.  Extension tags with distinct `(stage, col)` denote
/// distinct numbers (each stage uses a fresh width and each column a fresh
/// residue), and every extension position exceeds every held integer the
/// construction stores, so the variants never collide numerically.
impl PartialEq for SymPos {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (SymPos::Fin(a), SymPos::Fin(b)) => a == b,
            (SymPos::Ext(a), SymPos::Ext(b)) => (a.stage, a.col) == (b.stage, b.col),
            _ => false,
        }
    }
}
impl Eq for SymPos {}

impl PartialOrd for SymPos {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Container order: held integers by value, then extension tags by
/// `(stage, col)`.  Consistent with equality; not numeric order across
/// extension tags (which checkers never need).
impl Ord for SymPos {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (SymPos::Fin(a), SymPos::Fin(b)) => a.cmp(b),
            (SymPos::Fin(_), SymPos::Ext(_)) => Ordering::Less,
            (SymPos::Ext(_), SymPos::Fin(_)) => Ordering::Greater,
            (SymPos::Ext(a), SymPos::Ext(b)) => (a.stage, a.col).cmp(&(b.stage, b.col)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::One;

    fn ext(stage: u32, col: u64, lb2: u64) -> SymPos {
        SymPos::Ext(Rc::new(ExtPos {
            stage,
            col,
            width: StrLen::fin(BigUint::from(lb2 + 1)),
            value: SymStr::empty(),
            lb2,
        }))
    }

    #[test]
    fn certified_comparisons() {
        let p = ext(3, 1, 1000);
        assert_eq!(p.cmp_big(&(BigUint::one() << 999u32)).unwrap(), Ordering::Greater);
        assert!(p.cmp_big(&(BigUint::one() << 1000u32)).is_err());
        let f = SymPos::fin(BigUint::from(7u32));
        assert!(f.is_below(&BigUint::from(8u32)).unwrap());
        assert!(!f.is_below(&BigUint::from(7u32)).unwrap());
    }

    #[test]
    fn container_order_groups_variants() {
        let a = SymPos::fin(BigUint::from(u64::MAX));
        let b = ext(0, 0, 15);
        assert!(a < b);
        assert!(ext(1, 2, 10) < ext(2, 0, 10));
        assert_eq!(ext(2, 3, 10), ext(2, 3, 99));
    }
}
