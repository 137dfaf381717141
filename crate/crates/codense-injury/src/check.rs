//! Stage-by-stage audit checkers and the end-of-run report.
//!
//! Each checker guards one invariant the construction is supposed to keep.
//! A violation aborts the run with a breach naming the checker; the density
//! certificate at the end is informational only and never aborts.

use num::bigint::BigUint;
use num::One;
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use crate::error::InjuryError;
use crate::state::{StageEvents, StageState};

pub const INJURY_BUDGET: &str = "injury-budget";
pub const FROZEN_PREFIXES: &str = "frozen-prefixes";
pub const STASH_EXCHANGE: &str = "stash-exchange";
pub const COLUMN_VOTES: &str = "column-votes";
pub const SPARSE_PLACEMENT: &str = "sparse-placement";
pub const OVERLAY_SUPPORT: &str = "overlay-support";
pub const FLIP_LENGTH: &str = "flip-length";

pub const ALL_CHECKERS: [&str; 7] = [
    INJURY_BUDGET,
    FROZEN_PREFIXES,
    STASH_EXCHANGE,
    COLUMN_VOTES,
    SPARSE_PLACEMENT,
    OVERLAY_SUPPORT,
    FLIP_LENGTH,
];

fn breach(stage: u32, checker: &'static str, detail: String) -> InjuryError {
    InjuryError::Breach { stage, checker, detail }
}

/// `2^n` saturating in `u64`.
fn pow2_sat(n: u32) -> u64 {
    if n >= 63 {
        u64::MAX
    } else {
        1u64 << n
    }
}

pub(crate) fn per_stage(st: &StageState, ev: &StageEvents) -> Result<(), InjuryError> {
    let s = st.stage();

    // Requirement n may enter or leave the queue at most 2^n times, and a
    // re-entry is only legitimate as an injury by a stronger firing.
    for (&n, &cnt) in &st.enters {
        if cnt > pow2_sat(n) {
            return Err(breach(s, INJURY_BUDGET, format!("requirement {n} entered {cnt} times")));
        }
    }
    for (&n, &cnt) in &st.leaves {
        if cnt > pow2_sat(n) {
            return Err(breach(s, INJURY_BUDGET, format!("requirement {n} left {cnt} times")));
        }
    }
    for &m in &ev.injured {
        match ev.left {
            Some(n) if n < m => {}
            _ => {
                return Err(breach(
                    s,
                    INJURY_BUDGET,
                    format!("requirement {m} re-entered without a stronger firing"),
                ))
            }
        }
    }
    if let Some(n) = ev.enqueued_at {
        if n != s {
            return Err(breach(s, INJURY_BUDGET, format!("enqueued index {n} at stage {s}")));
        }
    }

    // A firing may only pull fresh stash members out of columns it resets
    // the same stage, and the stash it rewrites must keep its old members.
    if let Some(code) = &ev.hat_assigned_code {
        let cut = ev.reset_from.ok_or_else(|| {
            breach(s, STASH_EXCHANGE, "stash assigned without a column reset".into())
        })?;
        for (pos, src) in &ev.hat_entered {
            if *src < cut as u64 {
                return Err(breach(
                    s,
                    STASH_EXCHANGE,
                    format!("entrant {:?} sourced from kept column {src}", pos),
                ));
            }
        }
        let new_members = st
            .stash_views()
            .find(|(sig, _)| codense_core::code_bits(sig) == *code)
            .map(|(_, m)| m.clone())
            .unwrap_or_default();
        if let Some(prev) = &ev.hat_prev {
            for p in prev {
                if !new_members.contains(p) {
                    return Err(breach(
                        s,
                        STASH_EXCHANGE,
                        format!("reassignment dropped {:?}", p),
                    ));
                }
            }
        }
    }

    // Every column must reach the stage width after extension, recorded
    // flips must hit positions inside their target, and materializable
    // column values must agree pairwise on their overlaps.
    let width_s = st.width(s);
    for i in 0..=s as u64 {
        let members = st.column(i);
        let max_w = members.iter().map(|z| st.width_of(z)).max();
        match max_w {
            Some(w) if w.cmp_len(width_s) != Ordering::Less => {}
            _ => {
                return Err(breach(
                    s,
                    COLUMN_VOTES,
                    format!("column {i} never reached the stage width"),
                ))
            }
        }
    }
    for (z, pos) in &ev.flipped {
        if st.width_of(z).cmp_big(pos) != Ordering::Greater {
            return Err(breach(
                s,
                COLUMN_VOTES,
                format!("flip outside its target at {:?}", z),
            ));
        }
    }
    if let Some(wv) = width_s.as_fin() {
        if *wv <= BigUint::from(4096u32) {
            for (&i, members) in st.columns_map() {
                let mats: Vec<codense_core::FiniteBitSet> = members
                    .iter()
                    .filter_map(|z| st.value_at(z).materialize(4096))
                    .collect();
                for a in 0..mats.len() {
                    for b in a + 1..mats.len() {
                        let m = mats[a].len().min(mats[b].len());
                        if mats[a].slice(0, m) != mats[b].slice(0, m) {
                            return Err(breach(
                                s,
                                COLUMN_VOTES,
                                format!("column {i} values disagree on a shared prefix"),
                            ));
                        }
                    }
                }
            }
        }
    }

    // Placement stays sparse against every bound chosen so far: members
    // below the k-th bound, scaled by 2^k, never exceed the bound, and the
    // structural members are certified to lie above all of them.
    let fins: BTreeSet<&BigUint> =
        st.fin_ext_positions.iter().chain(st.fin_seed_positions.iter()).collect();
    for k in 0..=s {
        let l_k = st.bound(k);
        let below = fins.range::<BigUint, _>(..l_k).count() as u64;
        if BigUint::from(below) << k > *l_k {
            return Err(breach(
                s,
                SPARSE_PLACEMENT,
                format!("{below} members below the stage-{k} bound"),
            ));
        }
        if st.ext_sym_count > 0 && st.min_ext_lb2 < l_k.bits() {
            return Err(breach(
                s,
                SPARSE_PLACEMENT,
                format!("structural member not certified above the stage-{k} bound"),
            ));
        }
    }

    // Overlay entries only ever shadow placed positions.
    for key in st.overlay_keys() {
        if !st.ever_union.contains(key) {
            return Err(breach(s, OVERLAY_SUPPORT, format!("overlay at unplaced {:?}", key)));
        }
    }

    // Flips never change a value's length.
    for (z, _) in &ev.flipped {
        let have = st.value_at(z).len().clone();
        let want = st.width_of(z);
        if have != want {
            return Err(breach(s, FLIP_LENGTH, format!("flip changed the length at {:?}", z)));
        }
    }

    Ok(())
}

/// One row of the density certificate: how crowded the placed union is
/// below the stage-`k` bound, measured exactly.
#[derive(Debug, Clone, Serialize)]
pub struct DensityRow {
    pub k: u32,
    pub bound_bits: u64,
    pub members_below: u64,
    pub window_num: u64,
    pub window_den: Option<String>,
    pub window_den_bits: u64,
    pub window_ok: bool,
    pub tail_ok: bool,
}

/// End-of-run summary: totals, the audited invariants, and the density
/// certificate.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub stages: u32,
    pub firings: u64,
    pub toggles: u64,
    pub injuries: u64,
    pub union_size: u64,
    pub flips: u64,
    pub seeds: u64,
    pub checks: BTreeMap<String, String>,
    pub density: Vec<DensityRow>,
}

/// Retrospective check: once the requirements up to `n` have settled, the
/// sequence below their joint restraint is never touched again.
fn frozen_prefixes(st: &StageState) -> Result<(), InjuryError> {
    let indexes: BTreeSet<u32> = st.fire_log().iter().map(|r| r.n).collect();
    for &n in &indexes {
        let t_n = st
            .fire_log()
            .iter()
            .filter(|r| r.n <= n)
            .map(|r| r.stage)
            .max()
            .expect("index taken from the log");
        let rbar = st.restraint_ceiling(n + 1);
        for (s, idx, _) in st.restraint_log() {
            if *s > t_n && *idx <= n {
                return Err(breach(
                    *s,
                    FROZEN_PREFIXES,
                    format!("restraint {idx} raised after requirement {n} settled"),
                ));
            }
        }
        for (s, x) in st.z_log() {
            if *s > t_n && BigUint::from(*x) <= rbar {
                return Err(breach(
                    *s,
                    FROZEN_PREFIXES,
                    format!("toggle at {x} below the settled restraint of {n}"),
                ));
            }
        }
        for (s, pos) in st.flip_log() {
            if *s > t_n && *pos <= rbar {
                return Err(breach(
                    *s,
                    FROZEN_PREFIXES,
                    format!("flip below the settled restraint of {n}"),
                ));
            }
        }
    }
    Ok(())
}

fn density_certificate(st: &StageState) -> Vec<DensityRow> {
    let fins: BTreeSet<BigUint> = st
        .fin_ext_positions
        .iter()
        .chain(st.fin_seed_positions.iter())
        .cloned()
        .collect();
    let total = st.union_size();
    let mut rows = Vec::new();
    for k in 0..st.stage() {
        let l_k = st.bound(k).clone();
        // Sharpest finite window: ends at the bound or just after a member.
        let mut best_num = fins.range(..&l_k).count() as u64;
        let mut best_den = l_k.clone();
        let mut ok = BigUint::from(best_num) << k <= best_den;
        for v in fins.range(&l_k..) {
            let p = v + BigUint::one();
            let cnt = fins.range(..&p).count() as u64;
            if BigUint::from(cnt) << k > p {
                ok = false;
            }
            // Larger ratio wins: cnt/p > best_num/best_den.
            if BigUint::from(cnt) * &best_den > BigUint::from(best_num) * &p {
                best_num = cnt;
                best_den = p;
            }
        }
        let tail_ok = if st.ext_sym_count == 0 {
            true
        } else {
            BigUint::from(total).bits() + u64::from(k) <= st.min_ext_lb2
                && BigUint::from(st.min_ext_lb2) >= BigUint::from(best_den.bits())
        };
        rows.push(DensityRow {
            k,
            bound_bits: l_k.bits(),
            members_below: fins.range(..&l_k).count() as u64,
            window_num: best_num,
            window_den: (best_den.bits() <= 128).then(|| best_den.to_string()),
            window_den_bits: best_den.bits(),
            window_ok: ok,
            tail_ok,
        });
    }
    rows
}

pub(crate) fn final_report(st: &StageState) -> Result<RunReport, InjuryError> {
    frozen_prefixes(st)?;
    let mut checks = BTreeMap::new();
    for name in ALL_CHECKERS {
        checks.insert(name.to_string(), "pass".to_string());
    }
    let injuries: u64 = st.enters.values().map(|&c| c.saturating_sub(1)).sum();
    Ok(RunReport {
        stages: st.stage(),
        firings: st.fire_log().len() as u64,
        toggles: st.z_log().len() as u64,
        injuries,
        union_size: st.union_size(),
        flips: st.flip_log().len() as u64,
        seeds: st.fin_seed_positions.len() as u64,
        checks,
        density: density_certificate(st),
    })
}


impl RunReport {
    /// True when every audited invariant passed.
    pub fn all_pass(&self) -> bool {
        self.checks.values().all(|v| v == "pass")
    }
}
