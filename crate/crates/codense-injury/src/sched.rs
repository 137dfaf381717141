//! Per-stage placement bounds.
//!
//! Each stage fixes a bound below which the stage promises not to disturb
//! anything it later relies on.  The automatic rule makes the bound dominate
//! both a count of every element ever placed and the largest quantity the
//! run has handled so far, so the placed set provably thins out; quantities
//! too large to hold are excluded from the running maximum (they only ever
//! need to be dominated by counts, not by magnitudes) but still counted.

use num::bigint::BigUint;
use num::One;

use crate::error::InjuryError;

/// Quantities wider than this many bits stay out of the running maximum.
pub const MENTION_CAP_BITS: u64 = 1024;

/// Running audit of how much the construction has touched.
#[derive(Clone, Debug, Default)]
pub struct MentionTracker {
    placed: u64,
    max_seen: BigUint,
}

impl MentionTracker {
    /// Records a handled quantity; oversized values are ignored.
    pub fn mention(&mut self, q: &BigUint) {
        if q.bits() <= MENTION_CAP_BITS && *q > self.max_seen {
            self.max_seen = q.clone();
        }
    }

    pub fn mention_u64(&mut self, q: u64) {
        self.mention(&BigUint::from(q));
    }

    /// Records one element placed into the master union.
    pub fn count_placement(&mut self) {
        self.placed += 1;
    }

    pub fn placed(&self) -> u64 {
        self.placed
    }

    pub fn max_seen(&self) -> &BigUint {
        &self.max_seen
    }
}

/// How stage bounds are chosen.
#[derive(Clone, Debug)]
pub enum LSchedule {
    /// `2^{s+3}` times one more than placements plus the running maximum.
    Auto,
    /// Explicit bounds per stage, strictly increasing.
    Table(Vec<BigUint>),
}

impl LSchedule {
    /// Validates an explicit table.
    pub fn table(values: Vec<BigUint>) -> Result<Self, InjuryError> {
        for s in 1..values.len() {
            if values[s] <= values[s - 1] {
                return Err(InjuryError::ScheduleNotIncreasing(s as u32));
            }
        }
        Ok(LSchedule::Table(values))
    }

    pub fn value_at(&self, stage: u32, mentions: &MentionTracker) -> Result<BigUint, InjuryError> {
        match self {
            LSchedule::Auto => {
                let c = BigUint::from(mentions.placed()) + mentions.max_seen();
                Ok((BigUint::one() + c) << (stage as u64 + 3))
            }
            LSchedule::Table(v) => {
                v.get(stage as usize).cloned().ok_or(InjuryError::ScheduleExhausted(stage))
            }
        }
    }
}
