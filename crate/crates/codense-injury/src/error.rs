use thiserror::Error;

/// Failures of the staged construction or of its audit checks.
#[derive(Debug, Error)]
pub enum InjuryError {
    /// An audit invariant failed; the run aborts at the offending stage.
    #[error("stage {stage}: {checker} check failed: {detail}")]
    Breach { stage: u32, checker: &'static str, detail: String },

    /// The priority listing does not cover every requested stage.
    #[error("run over {need} stages needs a listing of at least {need} strings, got {have}")]
    PiTooShort { need: usize, have: usize },

    /// An explicit bound table ran out before the requested stage count.
    #[error("bound table exhausted at stage {0}")]
    ScheduleExhausted(u32),

    /// Bound values must grow strictly from stage to stage.
    #[error("bound table not strictly increasing at stage {0}")]
    ScheduleNotIncreasing(u32),

    /// A value was needed in materialized form but exceeds the cap.
    #[error("cannot materialize {what}: {bits} bits exceeds the cap")]
    Unrepresentable { what: &'static str, bits: u64 },

    /// A magnitude comparison could not be certified either way.
    #[error("cannot certify order between {left} and {right}")]
    Uncertified { left: String, right: String },

    #[error(transparent)]
    Core(#[from] codense_core::CoreError),
}
