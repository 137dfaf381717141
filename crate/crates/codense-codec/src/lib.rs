//! Block codes for value tuples.
//!
//! A tuple over the naturals is spread across an infinite family of bit
//! vectors of the tuple's width, one per code index. An index packs a
//! reference tuple together with a borrowing map, and a slot registers a bit
//! only when it beats the reference and some slot lends it a value above the
//! reference's maximum. Only finitely many indices carry a nonzero vector, so
//! the family truncates, and the distance between two families (the largest
//! per-index disagreement) is sandwiched by the number of slots on which the
//! source tuples differ. [`decode`] inverts [`encode`] by brute-force
//! minimization of that distance.

mod decode;
mod encode;
mod error;
mod idem;
mod index;
mod theta;

pub use decode::decode;
pub use encode::{borrow_bound, cwise_min, encode, encode_at, encode_one};
pub use error::CodecError;
pub use idem::{idempotent_maps, IdempotentMap};
pub use index::{code_index, code_index_u64, rank_map, split_index, unrank_map};
pub use theta::{ddist, height, truncate, Theta};
