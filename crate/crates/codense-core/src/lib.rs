//! Exact combinatorial substrate: a monotone pairing of pairs of naturals,
//! codes for bit strings and for tuples, finite bit sets, partial sequences
//! with box masking, windowed upper densities, and a small deterministic
//! oracle-program interpreter.
//!
//! Every density is an exact rational. There are no tolerance parameters and
//! no floating point anywhere in this crate.

pub mod bits;
pub mod coding;
pub mod density;
pub mod error;
pub mod pairing;
pub mod program;
pub mod seq;

pub use bits::FiniteBitSet;
pub use coding::{code_bits, code_tuple, code_tuple_u64, decode_bits, decode_tuple};
pub use density::{ratio_u64, window_density, Rational};
pub use error::CoreError;
pub use pairing::{column_position, pair, pair_big, unpair, unpair_big};
pub use program::{eval, EvalReport, Expr, FunctionalRegistry, Outcome};
pub use seq::{box_mask_partial, overlay, symdiff, BoxSeq, BoxVal, PartialSeq};

/// `I_n = [2^n, 2^{n+1})`, the n-th dyadic interval.
///
/// Panics if `n >= 63`.
pub fn interval_i(n: u32) -> (u64, u64) {
    assert!(n < 63, "dyadic interval index {n} out of range");
    (1u64 << n, 1u64 << (n + 1))
}

#[cfg(test)]
mod tests {
    use super::interval_i;

    #[test]
    fn dyadic_intervals() {
        assert_eq!(interval_i(0), (1, 2));
        assert_eq!(interval_i(3), (8, 16));
        for n in 0..20 {
            let (lo, hi) = interval_i(n);
            assert_eq!(hi - lo, 1 << n);
        }
    }
}
