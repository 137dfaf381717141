//! Staged finite-injury construction over the closed-form initial sequence.
//!
//! The run maintains a queue of requirements indexed by priority.  Each stage
//! picks a fresh placement bound, fires the least viable requirement (if
//! any), extends every column with a string recording the column's current
//! aggregate, and enqueues the next requirement from the normalized listing.
//! Satisfied requirements hold a restraint; firing a stronger requirement
//! injures weaker satisfied ones, sending them back to the queue.  All
//! mutations append to the trace, and audit checkers run every stage.

use codense_core::{
    code_bits, eval, pair_big, unpair_big, BoxVal, FiniteBitSet, FunctionalRegistry, Outcome,
};
use num::bigint::BigUint;
use num::{One, Zero};
use serde_json::{json, Value};
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::rc::Rc;

use crate::check;
use crate::error::InjuryError;
use crate::fzero::{f0_at, f0_string, f0_width, least_column_preimage};
use crate::pi::{i_pi, PiSeq};
use crate::pos::{ExtPos, SymPos};
use crate::scale::StrLen;
use crate::sched::{LSchedule, MentionTracker};
use crate::symstr::SymStr;
use crate::trace::{desc_big, Trace};

/// Positions wider than this many bits stay structural.
const POS_MAT_BITS: u64 = 1 << 20;
/// Strings longer than this many bits are never materialized.
const STR_MAT_BITS: usize = 1 << 21;

/// A queued requirement: which program it guards and along which string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triple {
    pub i: u64,
    pub sigma: FiniteBitSet,
}

/// A satisfied requirement, remembering the witness it fired on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Satisfied {
    pub i: u64,
    pub sigma: FiniteBitSet,
    pub x: u64,
}

/// The least witness a requirement fires on.
#[derive(Clone, Debug)]
pub struct Witness {
    pub x: u64,
    pub tau_code: u64,
    pub tau: FiniteBitSet,
    pub value: u64,
    pub trivial: bool,
}

/// One firing, as recorded in the run log.
#[derive(Clone, Debug)]
pub struct FireRecord {
    pub stage: u32,
    pub n: u32,
    pub i: u64,
    pub x: u64,
    pub tau_code: u64,
    pub value: u64,
    pub trivial: bool,
}

/// Outcome of evaluating a voting functional at one input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ThetaVal {
    Val(u8),
    Box,
    Undefined,
}

/// Everything one stage did, handed to the per-stage checkers.
#[derive(Default)]
pub(crate) struct StageEvents {
    pub fired: Option<FireRecord>,
    pub left: Option<u32>,
    pub injured: Vec<u32>,
    pub reset_from: Option<usize>,
    pub hat_assigned_code: Option<BigUint>,
    pub hat_prev: Option<BTreeSet<SymPos>>,
    pub hat_entered: Vec<(SymPos, u64)>,
    pub seeded: Vec<(u64, BigUint)>,
    pub flipped: Vec<(SymPos, BigUint)>,
    pub ext_added: Vec<(u64, SymPos)>,
    pub enqueued_at: Option<u32>,
}

/// Full run state plus the audit ledgers the checkers read.
pub struct StageState {
    stage: u32,
    bounds: Vec<BigUint>,
    widths: Vec<StrLen>,
    z: BTreeSet<u64>,
    overlay: BTreeMap<SymPos, SymStr>,
    columns: BTreeMap<u64, BTreeSet<SymPos>>,
    stashes: BTreeMap<BigUint, StashSet>,
    restraints: BTreeMap<u32, BigUint>,
    queue: BTreeMap<u32, Triple>,
    satisfied: BTreeMap<u32, Satisfied>,
    mentions: MentionTracker,

    // Audit ledgers.
    pub(crate) enters: BTreeMap<u32, u64>,
    pub(crate) leaves: BTreeMap<u32, u64>,
    pub(crate) ever_union: BTreeSet<SymPos>,
    pub(crate) origin_col: BTreeMap<SymPos, u64>,
    pub(crate) fin_ext_positions: BTreeSet<BigUint>,
    pub(crate) fin_seed_positions: BTreeSet<BigUint>,
    pub(crate) ext_sym_count: u64,
    pub(crate) min_ext_lb2: u64,
    pub(crate) fire_log: Vec<FireRecord>,
    pub(crate) z_log: Vec<(u32, u64)>,
    pub(crate) flip_log: Vec<(u32, BigUint)>,
    pub(crate) restraint_log: Vec<(u32, u32, BigUint)>,
}

#[derive(Clone, Debug)]
struct StashSet {
    sigma: FiniteBitSet,
    members: BTreeSet<SymPos>,
}

fn bits_to_string(s: &FiniteBitSet) -> String {
    s.iter().map(|b| if b { '1' } else { '0' }).collect()
}

/// Whether `⟨c, x⟩ = 2^{c+1}x + 2^c − 1` is below `bound`, without building
/// the value when the exponent alone already decides.
fn pair_code_below(c: &BigUint, x: u64, bound: &BigUint) -> bool {
    if *c >= BigUint::from(bound.bits()) {
        return false;
    }
    let c64 = u64::try_from(c).expect("code below a bit count");
    let v = (BigUint::from(x) << (c64 + 1)) + ((BigUint::one() << c64) - BigUint::one());
    v < *bound
}

impl Default for StageState {
    fn default() -> Self {
        Self::new()
    }
}

impl StageState {
    pub fn new() -> Self {
        StageState {
            stage: 0,
            bounds: Vec::new(),
            widths: Vec::new(),
            z: BTreeSet::new(),
            overlay: BTreeMap::new(),
            columns: BTreeMap::new(),
            stashes: BTreeMap::new(),
            restraints: BTreeMap::new(),
            queue: BTreeMap::new(),
            satisfied: BTreeMap::new(),
            mentions: MentionTracker::default(),
            enters: BTreeMap::new(),
            leaves: BTreeMap::new(),
            ever_union: BTreeSet::new(),
            origin_col: BTreeMap::new(),
            fin_ext_positions: BTreeSet::new(),
            fin_seed_positions: BTreeSet::new(),
            ext_sym_count: 0,
            min_ext_lb2: u64::MAX,
            fire_log: Vec::new(),
            z_log: Vec::new(),
            flip_log: Vec::new(),
            restraint_log: Vec::new(),
        }
    }

    // Accessors used by checkers, the harness, and tests.

    pub fn stage(&self) -> u32 {
        self.stage
    }

    pub fn bound(&self, s: u32) -> &BigUint {
        &self.bounds[s as usize]
    }

    pub fn bounds(&self) -> &[BigUint] {
        &self.bounds
    }

    pub fn width(&self, s: u32) -> &StrLen {
        &self.widths[s as usize]
    }

    pub fn z_bit(&self, x: u64) -> bool {
        self.z.contains(&x)
    }

    pub fn queue_keys(&self) -> Vec<u32> {
        self.queue.keys().copied().collect()
    }

    pub fn queued(&self, n: u32) -> Option<&Triple> {
        self.queue.get(&n)
    }

    pub fn satisfied_keys(&self) -> Vec<u32> {
        self.satisfied.keys().copied().collect()
    }

    pub fn satisfied_at(&self, n: u32) -> Option<&Satisfied> {
        self.satisfied.get(&n)
    }

    pub fn column(&self, i: u64) -> Vec<&SymPos> {
        self.columns.get(&i).map(|c| c.iter().collect()).unwrap_or_default()
    }

    pub fn column_size(&self, i: u64) -> usize {
        self.columns.get(&i).map_or(0, |c| c.len())
    }

    pub(crate) fn columns_map(&self) -> &BTreeMap<u64, BTreeSet<SymPos>> {
        &self.columns
    }

    pub(crate) fn stash_views(&self) -> impl Iterator<Item = (&FiniteBitSet, &BTreeSet<SymPos>)> {
        self.stashes.values().map(|s| (&s.sigma, &s.members))
    }

    pub fn stash_size(&self, sigma: &FiniteBitSet) -> usize {
        self.stashes.get(&code_bits(sigma)).map_or(0, |s| s.members.len())
    }

    pub fn overlay_size(&self) -> usize {
        self.overlay.len()
    }

    pub(crate) fn overlay_keys(&self) -> impl Iterator<Item = &SymPos> {
        self.overlay.keys()
    }

    pub fn union_size(&self) -> u64 {
        self.ever_union.len() as u64
    }

    pub fn fire_log(&self) -> &[FireRecord] {
        &self.fire_log
    }

    pub fn z_log(&self) -> &[(u32, u64)] {
        &self.z_log
    }

    pub fn flip_log(&self) -> &[(u32, BigUint)] {
        &self.flip_log
    }

    pub fn restraint_log(&self) -> &[(u32, u32, BigUint)] {
        &self.restraint_log
    }

    /// Restraint at index `n`: the default `n` until a firing raises it.
    pub fn restraint(&self, n: u32) -> BigUint {
        self.restraints.get(&n).cloned().unwrap_or_else(|| BigUint::from(n))
    }

    /// Largest restraint strictly below `n`; zero when `n` is zero.
    pub fn restraint_ceiling(&self, n: u32) -> BigUint {
        (0..n).map(|m| self.restraint(m)).max().unwrap_or_else(BigUint::zero)
    }

    // Values of the evolving sequence.

    /// Length of the string currently coded at `z` (flips never change it).
    pub fn width_of(&self, z: &SymPos) -> StrLen {
        match z {
            SymPos::Fin(p) => StrLen::fin(BigUint::from(f0_width(p))),
            SymPos::Ext(e) => e.width.clone(),
        }
    }

    /// The string currently coded at `z`.
    pub fn value_at(&self, z: &SymPos) -> SymStr {
        if let Some(v) = self.overlay.get(z) {
            return v.clone();
        }
        match z {
            SymPos::Fin(p) => SymStr::explicit(f0_string(p)),
            SymPos::Ext(e) => e.value.clone(),
        }
    }

    /// Current sequence value at a machine-sized position, as a code.
    pub fn f_small(&self, y: u64) -> u64 {
        let key = SymPos::fin(BigUint::from(y));
        match self.overlay.get(&key) {
            Some(v) => {
                let code = v.code_value(64).expect("small positions code short strings");
                u64::try_from(&code).expect("short codes fit")
            }
            None => crate::fzero::f0_small(y),
        }
    }

    /// Bit of the column-`i` aggregate at `pos`: the vote of every current
    /// column value long enough to reach it, which must agree.
    pub fn y_bit(&self, i: u64, pos: &BigUint) -> Result<Option<bool>, InjuryError> {
        let mut vote: Option<(bool, SymPos)> = None;
        if let Some(members) = self.columns.get(&i) {
            for z in members {
                if self.width_of(z).cmp_big(pos) != Ordering::Greater {
                    continue;
                }
                let b = self.value_at(z).bit(pos);
                match &vote {
                    None => vote = Some((b, z.clone())),
                    Some((prev, first)) if *prev != b => {
                        return Err(InjuryError::Breach {
                            stage: self.stage,
                            checker: check::COLUMN_VOTES,
                            detail: format!(
                                "column {i} disagrees at {}: {:?} vs {:?}",
                                pos, first, z
                            ),
                        });
                    }
                    _ => {}
                }
            }
        }
        Ok(vote.map(|(b, _)| b))
    }

    /// The column-`i` aggregate on `[0, window)`, erroring where undefined
    /// or conflicting.
    pub fn y_eval(&self, i: u64, window: usize) -> Result<FiniteBitSet, InjuryError> {
        let mut out = FiniteBitSet::zeros(window);
        for m in 0..window {
            match self.y_bit(i, &BigUint::from(m))? {
                Some(b) => out.set(m, b),
                None => {
                    return Err(InjuryError::Breach {
                        stage: self.stage,
                        checker: check::COLUMN_VOTES,
                        detail: format!("column {i} aggregate undefined at {m}"),
                    })
                }
            }
        }
        Ok(out)
    }

    /// Whether the string coded at `z` (a position in column `i`) is an
    /// initial segment of the column-`i` aggregate.
    pub fn compatible_with_column(&self, z: &BigUint, i: u64) -> Result<bool, InjuryError> {
        let (col, _) = unpair_big(z);
        assert_eq!(col, i, "position lies in a different column");
        let w = f0_width(z);
        let w_small = usize::try_from(w).expect("compatibility checks stay machine sized");
        let val = self.value_at(&SymPos::fin(z.clone()));
        let prefix = val.prefix_bits(w_small);
        for m in 0..w_small {
            match self.y_bit(i, &BigUint::from(m))? {
                Some(b) if b == prefix.get(m) => {}
                _ => return Ok(false),
            }
        }
        Ok(true)
    }

    /// Evaluates the voting functional for `sigma` against a finite box set
    /// `S` at input `x`: positions `⟨i, x⟩ ∈ S` vote box where `sigma` is 1,
    /// column aggregates vote bits where `sigma` is 0, and the votes add
    /// modulo 2 with box absorbing.
    pub fn theta_sigma(
        &self,
        sigma: &FiniteBitSet,
        s_set: &FiniteBitSet,
        x: u64,
    ) -> Result<ThetaVal, InjuryError> {
        let mut sum = 0u8;
        let mut saw_box = false;
        for i in 0..sigma.len() {
            if sigma.get(i) {
                let p = codense_core::pair(i as u64, x);
                let in_s = usize::try_from(p).map(|q| q < s_set.len() && s_set.get(q));
                if in_s.unwrap_or(false) {
                    saw_box = true;
                }
            } else {
                let head = sigma.slice(0, i);
                let pos = pair_big(
                    u64::try_from(&code_bits(&head)).expect("short prefix code"),
                    &BigUint::from(x),
                );
                match self.y_bit(i as u64, &pos)? {
                    Some(b) => sum ^= b as u8,
                    None => return Ok(ThetaVal::Undefined),
                }
            }
        }
        if saw_box {
            Ok(ThetaVal::Box)
        } else {
            Ok(ThetaVal::Val(sum))
        }
    }

    /// Positions of the master union selected by `tau`: stashes of its
    /// prefixes plus the columns where `tau` is 1.
    fn union_tau(&self, tau: &FiniteBitSet) -> BTreeSet<SymPos> {
        let mut out = BTreeSet::new();
        for k in 0..=tau.len() {
            if let Some(st) = self.stashes.get(&code_bits(&tau.slice(0, k))) {
                out.extend(st.members.iter().cloned());
            }
        }
        for j in 0..tau.len() {
            if tau.get(j) {
                if let Some(col) = self.columns.get(&(j as u64)) {
                    out.extend(col.iter().cloned());
                }
            }
        }
        out
    }

    /// Machine-sized members of a position set below `below`.
    fn small_members(set: &BTreeSet<SymPos>, below: u64) -> BTreeSet<u64> {
        let bound = BigUint::from(below);
        set.iter()
            .filter_map(|p| p.as_fin())
            .filter(|v| **v < bound)
            .map(|v| u64::try_from(v).expect("below a u64 bound"))
            .collect()
    }

    /// Least witness on which requirement `(n, i, sigma)` fires at the
    /// current stage, scanning `(x, tau)` lexicographically.
    pub fn viable_witness(
        &self,
        n: u32,
        triple: &Triple,
        registry: &FunctionalRegistry,
    ) -> Result<Option<Witness>, InjuryError> {
        let s = self.stage;
        if n >= s {
            return Ok(None);
        }
        let prog = match registry.get(triple.i) {
            Some(p) => p,
            None => return Ok(None),
        };
        let scode = code_bits(&triple.sigma);
        if scode >= BigUint::from(s) {
            // No tau below the stage extends sigma.
            return Ok(None);
        }
        let lprev = &self.bounds[(s - 1) as usize];
        let mut masks: BTreeMap<u64, Rc<BTreeSet<u64>>> = BTreeMap::new();
        for x in 0..s as u64 {
            if !pair_code_below(&scode, x, lprev) {
                continue;
            }
            for tc in 0..s as u64 {
                let tau = codense_core::decode_bits(&BigUint::from(tc));
                if !triple.sigma.is_prefix_of(&tau) {
                    continue;
                }
                let mask = masks
                    .entry(tc)
                    .or_insert_with(|| Rc::new(Self::small_members(&self.union_tau(&tau), s as u64)))
                    .clone();
                let oracle = |y: u64| {
                    if mask.contains(&y) {
                        BoxVal::Box
                    } else {
                        BoxVal::Val(self.f_small(y))
                    }
                };
                let report = eval(prog, x, &oracle, s as u64, s as u64);
                let value = match report.outcome {
                    Outcome::Halt(BoxVal::Val(v)) => v,
                    _ => continue,
                };
                let zx = self.z.contains(&x) as u64;
                let trivial = zx != value;
                if !trivial {
                    let xb = BigUint::from(x);
                    if xb <= self.restraint_ceiling(n) {
                        continue;
                    }
                    if xb < self.bounds[n as usize] {
                        continue;
                    }
                    let mut ok = true;
                    for j in 0..triple.sigma.len() {
                        if triple.sigma.get(j) {
                            continue;
                        }
                        let zpos = pair_big(j as u64, &xb);
                        if u64::from(n) > f0_width(&zpos) {
                            ok = false;
                            break;
                        }
                        if !self.compatible_with_column(&zpos, j as u64)? {
                            ok = false;
                            break;
                        }
                    }
                    if !ok {
                        continue;
                    }
                }
                return Ok(Some(Witness { x, tau_code: tc, tau, value, trivial }));
            }
        }
        Ok(None)
    }

    /// The least-priority queued requirement with a witness, if any.
    fn least_viable(
        &self,
        registry: &FunctionalRegistry,
    ) -> Result<Option<(u32, Triple, Witness)>, InjuryError> {
        for (&n, triple) in &self.queue {
            if let Some(w) = self.viable_witness(n, triple, registry)? {
                return Ok(Some((n, triple.clone(), w)));
            }
        }
        Ok(None)
    }

    fn note_new_member(&mut self, pos: &SymPos, col: u64, kind: MemberKind) {
        if self.ever_union.insert(pos.clone()) {
            self.mentions.count_placement();
        }
        self.origin_col.entry(pos.clone()).or_insert(col);
        match pos {
            SymPos::Fin(v) => {
                let target = match kind {
                    MemberKind::Extension => &mut self.fin_ext_positions,
                    MemberKind::Seed => &mut self.fin_seed_positions,
                };
                target.insert(v.clone());
            }
            SymPos::Ext(e) => {
                self.ext_sym_count += 1;
                self.min_ext_lb2 = self.min_ext_lb2.min(e.lb2);
            }
        }
    }

    fn in_any_stash(&self, pos: &SymPos) -> bool {
        self.stashes.values().any(|s| s.members.contains(pos))
    }

    fn find_column_of(&self, pos: &SymPos) -> Option<u64> {
        self.columns.iter().find(|(_, set)| set.contains(pos)).map(|(&j, _)| j)
    }

    fn fire(
        &mut self,
        n: u32,
        triple: Triple,
        wit: Witness,
        ev: &mut StageEvents,
        trace: &mut Trace,
    ) -> Result<(), InjuryError> {
        let s = self.stage;
        let l_s = self.bounds[s as usize].clone();
        let sigma = triple.sigma.clone();
        let scode = code_bits(&sigma);
        self.mentions.mention_u64(wit.x);
        self.mentions.mention_u64(wit.tau_code);
        self.mentions.mention_u64(wit.value);
        trace.rec(
            s,
            "fire",
            json!({
                "index": n,
                "program": triple.i,
                "sigma": bits_to_string(&sigma),
                "x": wit.x,
                "tau": bits_to_string(&wit.tau),
                "value": wit.value,
                "trivial": wit.trivial,
            }),
            Value::Null,
            Value::Null,
        );

        // Move the selected part of the master union into the stash for
        // sigma: everything tau selects except the columns sigma keeps.
        let union_tau = self.union_tau(&wit.tau);
        let mut kept = BTreeSet::new();
        for j in 0..sigma.len() {
            if sigma.get(j) {
                if let Some(col) = self.columns.get(&(j as u64)) {
                    kept.extend(col.iter().cloned());
                }
            }
        }
        let new_hat: BTreeSet<SymPos> =
            union_tau.difference(&kept).cloned().collect();
        for posn in &new_hat {
            if !self.in_any_stash(posn) {
                let src = self.find_column_of(posn).ok_or_else(|| InjuryError::Breach {
                    stage: s,
                    checker: check::STASH_EXCHANGE,
                    detail: format!("stash entrant {:?} came from no column", posn),
                })?;
                ev.hat_entered.push((posn.clone(), src));
            }
        }
        let prev = self.stashes.insert(scode.clone(), StashSet {
            sigma: sigma.clone(),
            members: new_hat.clone(),
        });
        ev.hat_prev = Some(prev.map(|p| p.members).unwrap_or_default());
        ev.hat_assigned_code = Some(scode.clone());
        trace.rec(
            s,
            "stash",
            json!({ "sigma": bits_to_string(&sigma) }),
            json!(ev.hat_prev.as_ref().map_or(0, |p| p.len())),
            json!(new_hat.len()),
        );

        // Reset every column sigma does not keep.
        ev.reset_from = Some(sigma.len());
        let to_reset: Vec<u64> = self
            .columns
            .iter()
            .filter(|(&j, set)| j >= sigma.len() as u64 && !set.is_empty())
            .map(|(&j, _)| j)
            .collect();
        for j in to_reset {
            let old = self.columns.remove(&j).map_or(0, |s| s.len());
            trace.rec(s, "reset", json!({ "column": j }), json!(old), json!(0));
        }

        // Raise the restraint and move the requirement to the satisfied set.
        let old_r = self.restraint(n);
        self.restraints.insert(n, l_s.clone());
        self.restraint_log.push((s, n, l_s.clone()));
        trace.rec(s, "restrain", json!({ "index": n }), desc_big(&old_r), desc_big(&l_s));
        self.queue.remove(&n);
        *self.leaves.entry(n).or_insert(0) += 1;
        ev.left = Some(n);
        self.satisfied.insert(n, Satisfied { i: triple.i, sigma: sigma.clone(), x: wit.x });
        trace.rec(s, "satisfy", json!({ "index": n }), json!("queued"), json!("satisfied"));

        // Injure weaker satisfied requirements: back to the queue, stash
        // dropped.
        let weaker: Vec<u32> = self.satisfied.range(n + 1..).map(|(&m, _)| m).collect();
        for m in weaker {
            let q = self.satisfied.remove(&m).expect("key just listed");
            self.stashes.remove(&code_bits(&q.sigma));
            self.queue.insert(m, Triple { i: q.i, sigma: q.sigma.clone() });
            *self.enters.entry(m).or_insert(0) += 1;
            ev.injured.push(m);
            trace.rec(s, "requeue", json!({ "index": m }), json!("satisfied"), json!("queued"));
        }

        if !wit.trivial {
            // Diagonalize.
            let before = self.z.contains(&wit.x);
            if before {
                self.z.remove(&wit.x);
            } else {
                self.z.insert(wit.x);
            }
            self.z_log.push((s, wit.x));
            trace.rec(s, "toggle", json!({ "x": wit.x }), json!(before as u8), json!(!before as u8));

            // Seed the kept-out columns so their aggregates can absorb the
            // change.
            let xb = BigUint::from(wit.x);
            for j in 0..sigma.len() {
                if sigma.get(j) {
                    continue;
                }
                let p = pair_big(j as u64, &xb);
                self.mentions.mention(&p);
                let posn = SymPos::fin(p.clone());
                self.columns.entry(j as u64).or_default().insert(posn.clone());
                self.note_new_member(&posn, j as u64, MemberKind::Seed);
                ev.seeded.push((j as u64, p.clone()));
                trace.rec(s, "seed", json!({ "column": j }), Value::Null, desc_big(&p));
            }

            // Flip the kept columns above the witness so computations that
            // saw the old aggregate still converge.
            for j in 0..sigma.len() {
                if !sigma.get(j) {
                    continue;
                }
                let head_code = code_bits(&sigma.slice(0, j));
                let c64 = u64::try_from(&head_code).expect("prefix code below the stage");
                let fpos = pair_big(c64, &xb);
                self.mentions.mention(&fpos);
                let targets: Vec<SymPos> = self
                    .columns
                    .get(&(j as u64))
                    .map(|set| {
                        set.iter()
                            .filter(|z| self.width_of(z).cmp_big(&fpos) == Ordering::Greater)
                            .cloned()
                            .collect()
                    })
                    .unwrap_or_default();
                for z in targets {
                    let old = self.value_at(&z);
                    let before = old.bit(&fpos);
                    let new = old.flip(&fpos);
                    assert_eq!(old.len(), new.len(), "flip must preserve length");
                    self.overlay.insert(z.clone(), new);
                    self.flip_log.push((s, fpos.clone()));
                    ev.flipped.push((z.clone(), fpos.clone()));
                    trace.rec(
                        s,
                        "flip",
                        json!({ "column": j, "element": z.describe(), "position": desc_big(&fpos) }),
                        json!(before as u8),
                        json!(!before as u8),
                    );
                }
            }
        }

        let rec = FireRecord {
            stage: s,
            n,
            i: triple.i,
            x: wit.x,
            tau_code: wit.tau_code,
            value: wit.value,
            trivial: wit.trivial,
        };
        self.fire_log.push(rec.clone());
        ev.fired = Some(rec);
        Ok(())
    }

    /// The longest current value in column `i`, if the column is nonempty.
    fn longest_column_value(&self, i: u64) -> Option<SymStr> {
        let members = self.columns.get(&i)?;
        let mut best: Option<(StrLen, &SymPos)> = None;
        for z in members {
            let w = self.width_of(z);
            match &best {
                Some((bw, _)) if bw.cmp_len(&w) != Ordering::Less => {}
                _ => best = Some((w, z)),
            }
        }
        best.map(|(_, z)| self.value_at(z))
    }

    /// Canonical fresh position for column `i` coding `sigma` at the stage
    /// width: second coordinate `⟨width − 1, B·2^{i·width}⟩` for the digit
    /// value `B` of `sigma`, materialized when small enough.
    fn make_ext_position(
        &mut self,
        i: u64,
        width: &StrLen,
        sigma: &SymStr,
    ) -> Result<SymPos, InjuryError> {
        if let Some(wv) = width.as_fin() {
            if let Ok(w64) = u64::try_from(wv) {
                if (i + 1).saturating_mul(w64).saturating_add(64) <= POS_MAT_BITS {
                    let mat = sigma
                        .materialize(STR_MAT_BITS)
                        .expect("width under the position cap materializes");
                    let code = code_bits(&mat);
                    let b = &code - ((BigUint::one() << w64) - BigUint::one());
                    let k = &b << (i * w64);
                    let y = pair_big(w64 - 1, &k);
                    let x = pair_big(i, &y);
                    self.mentions.mention(&code);
                    self.mentions.mention(&k);
                    self.mentions.mention(&y);
                    self.mentions.mention(&x);
                    // The identity the placement relies on, checked
                    // literally while the scale allows.
                    debug_assert_eq!(f0_at(&x), code, "placed position codes the string");
                    if self.stage == 0 && i == 0 {
                        let least = least_column_preimage(0, &mat);
                        assert_eq!(
                            BigUint::from(least),
                            y,
                            "canonical second coordinate is the least one"
                        );
                    }
                    return Ok(SymPos::fin(x));
                }
            }
        }
        Ok(SymPos::Ext(Rc::new(ExtPos {
            stage: self.stage,
            col: i,
            width: width.clone(),
            value: sigma.clone(),
            lb2: width.value_minus_one_sat(),
        })))
    }

    fn extend_columns(&mut self, ev: &mut StageEvents, trace: &mut Trace) -> Result<(), InjuryError> {
        let s = self.stage;
        let width = self.widths[s as usize].clone();
        let l_s = self.bounds[s as usize].clone();
        for i in 0..=s as u64 {
            if let Some(cut) = ev.reset_from {
                if i >= cut as u64 {
                    assert_eq!(self.column_size(i), 0, "reset column refilled before extension");
                }
            }
            let base = self.longest_column_value(i).unwrap_or_else(SymStr::empty);
            assert_eq!(
                base.len().cmp_len(&width),
                Ordering::Less,
                "aggregate outgrew the stage width"
            );
            let sigma = SymStr::padded(base, width.clone());
            let posn = self.make_ext_position(i, &width, &sigma)?;
            assert!(!self.overlay.contains_key(&posn), "fresh position already overlaid");
            assert_eq!(
                posn.cmp_big(&l_s)?,
                Ordering::Greater,
                "extension must land above the stage bound"
            );
            self.columns.entry(i).or_default().insert(posn.clone());
            self.note_new_member(&posn, i, MemberKind::Extension);
            ev.ext_added.push((i, posn.clone()));
            trace.rec(
                s,
                "extend",
                json!({ "column": i, "width": width.describe() }),
                Value::Null,
                posn.describe(),
            );
        }
        Ok(())
    }

    /// Runs one stage: pick the bound, fire the least viable requirement,
    /// extend all columns, enqueue the next requirement, then audit.
    pub fn step(
        &mut self,
        pi: &PiSeq,
        registry: &FunctionalRegistry,
        sched: &LSchedule,
        trace: &mut Trace,
    ) -> Result<(), InjuryError> {
        let s = self.stage;
        if pi.len() <= s as usize {
            return Err(InjuryError::PiTooShort { need: s as usize + 1, have: pi.len() });
        }

        let l = sched.value_at(s, &self.mentions)?;
        if let Some(prev) = self.bounds.last() {
            if l <= *prev {
                return Err(InjuryError::ScheduleNotIncreasing(s));
            }
        }
        trace.rec(s, "bound", json!("l"), Value::Null, desc_big(&l));
        self.mentions.mention(&l);
        self.bounds.push(l);

        let width = StrLen::hat(s, &self.bounds[s as usize]);
        if let Some(prev) = self.widths.last() {
            assert_eq!(prev.cmp_len(&width), Ordering::Less, "widths must grow");
        }
        if let Some(v) = width.as_fin() {
            self.mentions.mention(v);
        }
        self.widths.push(width);

        let mut ev = StageEvents::default();

        if let Some((n, triple, wit)) = self.least_viable(registry)? {
            self.fire(n, triple, wit, &mut ev, trace)?;
        }

        self.extend_columns(&mut ev, trace)?;

        let n = s;
        let triple = Triple {
            i: i_pi(pi, n as usize) as u64,
            sigma: pi.get(n as usize).clone(),
        };
        trace.rec(
            s,
            "enqueue",
            json!({
                "index": n,
                "program": triple.i,
                "sigma": bits_to_string(&triple.sigma),
            }),
            Value::Null,
            json!("queued"),
        );
        self.queue.insert(n, triple);
        *self.enters.entry(n).or_insert(0) += 1;
        ev.enqueued_at = Some(n);

        check::per_stage(self, &ev)?;
        self.stage += 1;
        Ok(())
    }
}

#[derive(Clone, Copy)]
enum MemberKind {
    Extension,
    Seed,
}
