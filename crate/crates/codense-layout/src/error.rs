use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LayoutError {
    #[error("row {0}: b must be positive")]
    ZeroB(usize),
    #[error("row {row}: payload width 2^{n} exceeds the materialization cap")]
    PayloadTooWide { row: usize, n: u32 },
    #[error("row {row} too large: {what} is not representable")]
    RowTooLarge { row: usize, what: &'static str },
    #[error("schedule has only {0} rows")]
    ScheduleExhausted(usize),
    #[error("payload {row} has length {got}, row width is {want}")]
    PayloadLength { row: usize, got: usize, want: usize },
    #[error("position lies beyond the last laid-out interval")]
    PositionBeyondLayout,
    #[error("repetition base must be nonempty")]
    EmptyBase,
    #[error("length {0} is not divisible by 2^{1}")]
    LengthNotDivisible(usize, u32),
    #[error("repetition result would exceed the materialization cap")]
    RepetitionTooLong,
    #[error("base count exceeds the preceding interval boundary")]
    BaseCountTooLarge,
    #[error("schedule literal must be \"paper\" or an array of {{n, b}} rows")]
    BadScheduleLiteral,
}
