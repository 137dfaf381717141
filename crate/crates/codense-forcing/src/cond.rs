use std::collections::{BTreeMap, BTreeSet};

use codense_core::{FiniteBitSet, PartialSeq};
use serde::de::Error as _;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ForcingError;

/// `count / l <= 2^{-shift}`, decided exactly in integers.
pub(crate) fn ratio_within(count: u128, l: usize, shift: u32) -> bool {
    match count.checked_shl(shift) {
        Some(scaled) => scaled <= l as u128,
        None => count == 0,
    }
}

/// Every prefix-window ratio of `s` over lengths in `[a, b]` stays within
/// `2^{-k}`. Lengths below one are skipped; an empty range holds vacuously.
pub(crate) fn window_within(s: &FiniteBitSet, a: usize, b: usize, k: u32) -> bool {
    debug_assert!(b <= s.len());
    if k == 0 {
        return true;
    }
    let a = a.max(1);
    let mut count: u128 = 0;
    for (i, bit) in s.iter().enumerate().take(b) {
        if bit {
            count += 1;
        }
        let l = i + 1;
        if l >= a && !ratio_within(count, l, k) {
            return false;
        }
    }
    true
}

/// `longer` agrees with `shorter` on every slot below the shorter length.
pub(crate) fn slotwise_prefix(shorter: &PartialSeq, longer: &PartialSeq) -> bool {
    shorter.len() <= longer.len() && (0..shorter.len()).all(|x| shorter.get(x) == longer.get(x))
}

/// Every defined slot of `small` keeps its value in `big`.
pub(crate) fn refines(small: &PartialSeq, big: &PartialSeq) -> bool {
    (0..small.len()).all(|x| small.get(x).is_none() || big.get(x) == small.get(x))
}

/// A committed bit prefix together with a conceded density exponent: past
/// commitments, at most a `2^{-k}` fraction of positions may carry ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ICond {
    sigma: FiniteBitSet,
    k: u32,
}

impl ICond {
    /// Admits the pair when the prefix itself honors the bound, i.e. its own
    /// ones ratio is within `2^{-k}`.
    pub fn new(sigma: FiniteBitSet, k: u32) -> Result<ICond, ForcingError> {
        if !window_within(&sigma, sigma.len(), sigma.len(), k) {
            return Err(ForcingError::DensityAboveBound { k });
        }
        Ok(ICond { sigma, k })
    }

    pub fn sigma(&self) -> &FiniteBitSet {
        &self.sigma
    }

    pub fn k(&self) -> u32 {
        self.k
    }
}

/// Extension order: the bound tightens, the prefix grows, and every window
/// of the longer prefix from the shorter length on keeps the old bound.
pub fn icond_leq(p: &ICond, q: &ICond) -> bool {
    q.k >= p.k
        && p.sigma.is_prefix_of(&q.sigma)
        && window_within(&q.sigma, p.sigma.len(), q.sigma.len(), p.k)
}

/// A finite prefix `s` realizes `p` when it extends the committed prefix and
/// every available window from the commitment on stays within the bound.
/// Necessary for any infinite completion of `s` to satisfy `p`, never
/// sufficient: later windows are unseen.
pub fn realizes_window(s: &FiniteBitSet, p: &ICond) -> bool {
    p.sigma.is_prefix_of(s) && window_within(s, p.sigma.len(), s.len(), p.k)
}

/// A density condition paired with a total stem of values already fixed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PCond {
    tau: PartialSeq,
    p: ICond,
}

impl PCond {
    pub fn new(tau: PartialSeq, p: ICond) -> Result<PCond, ForcingError> {
        for x in 0..tau.len() {
            if tau.get(x).is_none() {
                return Err(ForcingError::StemPartial { x });
            }
        }
        Ok(PCond { tau, p })
    }

    pub fn tau(&self) -> &PartialSeq {
        &self.tau
    }

    pub fn cond(&self) -> &ICond {
        &self.p
    }
}

/// Componentwise extension: the stem grows and the density part extends.
pub fn pcond_leq(a: &PCond, b: &PCond) -> bool {
    slotwise_prefix(&a.tau, &b.tau) && icond_leq(&a.p, &b.p)
}

/// A density condition whose masked positions carry replacement values.
/// The replacements are defined exactly on the ones of the mask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FCond {
    sigma: FiniteBitSet,
    k: u32,
    gamma: PartialSeq,
}

impl FCond {
    /// Admits the triple when `(sigma, k)` honors the density bound and the
    /// defined slots of `gamma` are exactly the ones of `sigma`. The stored
    /// `gamma` is padded or trimmed to the mask length.
    pub fn new(sigma: FiniteBitSet, k: u32, gamma: PartialSeq) -> Result<FCond, ForcingError> {
        if !window_within(&sigma, sigma.len(), sigma.len(), k) {
            return Err(ForcingError::DensityAboveBound { k });
        }
        for x in 0..sigma.len().max(gamma.len()) {
            let masked = x < sigma.len() && sigma.get(x);
            if gamma.get(x).is_some() != masked {
                return Err(ForcingError::GammaDomain { x });
            }
        }
        let gamma = PartialSeq::from_slots((0..sigma.len()).map(|x| gamma.get(x)).collect());
        Ok(FCond { sigma, k, gamma })
    }

    /// Convenience constructor from `(position, value)` replacement pairs.
    pub fn from_pairs(
        sigma: FiniteBitSet,
        k: u32,
        pairs: impl IntoIterator<Item = (usize, u64)>,
    ) -> Result<FCond, ForcingError> {
        let mut slots = vec![None; sigma.len()];
        for (x, v) in pairs {
            if x >= sigma.len() {
                return Err(ForcingError::GammaDomain { x });
            }
            slots[x] = Some(v);
        }
        FCond::new(sigma, k, PartialSeq::from_slots(slots))
    }

    pub fn sigma(&self) -> &FiniteBitSet {
        &self.sigma
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn gamma(&self) -> &PartialSeq {
        &self.gamma
    }

    pub fn icond(&self) -> ICond {
        ICond { sigma: self.sigma.clone(), k: self.k }
    }
}

/// Extension order: replacements are preserved and the density part extends.
pub fn fcond_leq(a: &FCond, b: &FCond) -> bool {
    refines(&a.gamma, &b.gamma)
        && b.k >= a.k
        && a.sigma.is_prefix_of(&b.sigma)
        && window_within(&b.sigma, a.sigma.len(), b.sigma.len(), a.k)
}

/// Passive bookkeeping record pairing a bit string with a window exponent
/// and a finite index set. Carries no ordering of its own.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IStarTuple {
    pub xi: FiniteBitSet,
    pub w: u32,
    pub e: BTreeSet<u64>,
}

#[derive(Serialize, Deserialize)]
struct ICondLit {
    sigma: FiniteBitSet,
    k: u32,
}

impl Serialize for ICond {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ICondLit { sigma: self.sigma.clone(), k: self.k }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for ICond {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let lit = ICondLit::deserialize(de)?;
        ICond::new(lit.sigma, lit.k).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct PCondLit {
    tau: Vec<u64>,
    p: ICond,
}

impl Serialize for PCond {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let tau = self.tau.values().expect("stems are total");
        PCondLit { tau, p: self.p.clone() }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for PCond {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let lit = PCondLit::deserialize(de)?;
        PCond::new(PartialSeq::total(lit.tau), lit.p).map_err(D::Error::custom)
    }
}

impl Serialize for FCond {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = ser.serialize_struct("FCond", 3)?;
        st.serialize_field("sigma", &self.sigma)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("gamma", &GammaMap(&self.gamma))?;
        st.end()
    }
}

struct GammaMap<'a>(&'a PartialSeq);

impl Serialize for GammaMap<'_> {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let entries: Vec<(String, u64)> = (0..self.0.len())
            .filter_map(|x| self.0.get(x).map(|v| (x.to_string(), v)))
            .collect();
        let mut map = ser.serialize_map(Some(entries.len()))?;
        for (key, v) in &entries {
            map.serialize_entry(key, v)?;
        }
        map.end()
    }
}

#[derive(Deserialize)]
struct FCondLit {
    sigma: FiniteBitSet,
    k: u32,
    #[serde(default)]
    gamma: BTreeMap<String, u64>,
}

impl<'de> Deserialize<'de> for FCond {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let lit = FCondLit::deserialize(de)?;
        let mut pairs = Vec::with_capacity(lit.gamma.len());
        for (key, v) in lit.gamma {
            let x: usize = key.parse().map_err(|_| {
                D::Error::custom(format!("gamma key {key:?} is not a position"))
            })?;
            pairs.push((x, v));
        }
        FCond::from_pairs(lit.sigma, lit.k, pairs).map_err(D::Error::custom)
    }
}
