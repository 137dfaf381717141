//! Finite-injury construction simulator over the exact density calculus.
//!
//! The crate builds the diagonalizing sequence stage by stage: a normalized
//! priority listing supplies the requirements, a bound schedule keeps
//! placements sparse, and programs from a registry are the adversaries the
//! requirements diagonalize against.  Magnitudes beyond machine scale are
//! carried structurally, so a run can take hundreds of stages without ever
//! materializing the doubly exponential strings it reasons about.  Every
//! stage is audited by checkers; a breach aborts the run.

mod check;
mod error;
mod fzero;
mod pi;
mod pos;
mod scale;
mod sched;
mod state;
mod symstr;
mod trace;

pub use check::{DensityRow, RunReport, ALL_CHECKERS};
pub use error::InjuryError;
pub use fzero::{
    f0_at, f0_small, f0_string, f0_width, joint_preimage_density, joint_preimage_members,
    joint_preimage_period, least_column_preimage,
};
pub use pi::{i_pi, normalize_pi, PiSeq};
pub use pos::{ExtPos, SymPos};
pub use scale::{StrLen, CANON_BITS};
pub use sched::{LSchedule, MentionTracker, MENTION_CAP_BITS};
pub use state::{FireRecord, Satisfied, StageState, ThetaVal, Triple, Witness};
pub use symstr::SymStr;
pub use trace::{desc_big, Trace};

use codense_core::FunctionalRegistry;

/// A finished run: the stage-by-stage trace, the audit report, and the
/// final state for further inspection.
pub struct RunOutput {
    pub trace: String,
    pub report: RunReport,
    pub state: StageState,
}

impl std::fmt::Debug for RunOutput {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RunOutput")
            .field("trace_lines", &self.trace.lines().count())
            .field("report", &self.report)
            .finish_non_exhaustive()
    }
}

/// Runs the construction for `stages` stages and audits it throughout.
pub fn run(
    pi: &PiSeq,
    registry: &FunctionalRegistry,
    sched: &LSchedule,
    stages: u32,
) -> Result<RunOutput, InjuryError> {
    assert!(stages >= 1, "a run needs at least one stage");
    if pi.len() < stages as usize {
        return Err(InjuryError::PiTooShort { need: stages as usize, have: pi.len() });
    }
    let mut state = StageState::new();
    let mut trace = Trace::new();
    for _ in 0..stages {
        state.step(pi, registry, sched, &mut trace)?;
    }
    let report = check::final_report(&state)?;
    Ok(RunOutput { trace: trace.to_jsonl(), report, state })
}
