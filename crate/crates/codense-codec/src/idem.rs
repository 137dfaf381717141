use crate::error::CodecError;

/// Self-map of `{0, .., n-1}` with `q(q(x)) = q(x)`, checked on construction.
///
/// Idempotence splits the slots into borrowers (fixed points) and lenders
/// (everything else): `q(y) = x` for some `y` exactly when `q(x) = x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdempotentMap {
    slots: Vec<usize>,
}

impl IdempotentMap {
    pub fn new(slots: Vec<usize>) -> Result<Self, CodecError> {
        if slots.is_empty() {
            return Err(CodecError::ZeroArity);
        }
        let n = slots.len();
        for &v in &slots {
            if v >= n {
                return Err(CodecError::MapValueOutOfRange { value: v, arity: n });
            }
        }
        if !is_idempotent(&slots) {
            return Err(CodecError::NotIdempotent);
        }
        Ok(IdempotentMap { slots })
    }

    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "arity must be positive");
        IdempotentMap { slots: (0..n).collect() }
    }

    pub fn arity(&self) -> usize {
        self.slots.len()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.slots[x]
    }

    pub fn slots(&self) -> &[usize] {
        &self.slots
    }
}

/// Whether `q(q(x)) = q(x)` for every slot; values must already be in range.
pub(crate) fn is_idempotent(slots: &[usize]) -> bool {
    slots.iter().all(|&v| slots[v] == v)
}

/// Every idempotent self-map of `{0, .., n-1}`, in ascending rank order
/// (rank as in [`crate::rank_map`]).
pub fn idempotent_maps(n: usize) -> Vec<IdempotentMap> {
    assert!(n > 0, "arity must be positive");
    let mut out = Vec::new();
    let mut slots = vec![0usize; n];
    loop {
        if is_idempotent(&slots) {
            out.push(IdempotentMap { slots: slots.clone() });
        }
        // Mixed-radix increment, most significant slot last.
        let mut i = 0;
        while i < n {
            slots[i] += 1;
            if slots[i] < n {
                break;
            }
            slots[i] = 0;
            i += 1;
        }
        if i == n {
            return out;
        }
    }
}
