//! Round-trip coding of value sequences through laid-out bit sets.
//!
//! A sequence is cut into the dyadic intervals `I_n = [2^n, 2^{n+1})`, each
//! restriction is block-coded at every code index in turn, and the resulting
//! vectors are spread across a repetition layout, one row per `(n, s)` pair.
//! The image determines the source: reading one column of rows back yields a
//! block family whose decode recovers the restriction exactly, and position
//! 0, which no interval contains, is pinned to 0.
//!
//! The round trip is robust in two senses that the perturbation tools
//! quantify. Corrupting a minority of copies within a row leaves the majority
//! vote, and hence the recovered values, untouched. Changing the source on a
//! sparse site set moves each row's image by at most the coded fraction plus
//! the row's error budget, measured as an exact windowed density.

mod error;
mod gamma;
mod perturb;
mod theta_view;

pub use error::CoarseError;
pub use gamma::{gamma_prefix, GammaImage};
pub use perturb::{
    compare_images, perturb_experiment, perturb_seq, PerturbReport, RowReport,
};
pub use theta_view::{
    gamma_hat_interval, gamma_hat_interval_with, gamma_hat_prefix, materialize_row, ThetaView,
};
