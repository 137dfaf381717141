use thiserror::Error;

/// Failures of condition construction and of the finitary checks.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ForcingError {
    /// The committed prefix already exceeds the conceded density bound.
    #[error("window density above 2^-{k} for the committed prefix")]
    DensityAboveBound { k: u32 },

    /// Replacement values must be defined exactly on the masked positions.
    #[error("gamma domain disagrees with the mask at {x}")]
    GammaDomain { x: usize },

    /// The stem of a paired condition must be total.
    #[error("stem has an undefined slot at {x}")]
    StemPartial { x: usize },

    /// Overlaying needs the base value wherever the mask is zero.
    #[error("f undefined at a needed position {x}")]
    OverlayUndefined { x: usize },

    /// No admissible split length exists inside the supplied prefixes.
    #[error("prefix too short: every split up to {have} fails the bound")]
    PrefixTooShort { have: usize },

    /// The program ran out of steps, so the refutation check proves nothing.
    #[error("inconclusive: step budget exhausted at input {x}")]
    Inconclusive { x: u64 },

    /// A side condition handed to the refutation check does not extend the base.
    #[error("side condition {which} does not extend the base condition")]
    NotExtending { which: u8 },
}
