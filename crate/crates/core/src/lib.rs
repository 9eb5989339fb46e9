//! Permutation groups, self-similar groups and the transposition telescope.
//!
//! A finitely generated group `G` acting on finite sets `Ω_i` is extended by
//! one point `q_i` per set and the transposition `τ_i = (p_i, q_i)`. The
//! group generated by the diagonal image of `G` and `(τ_i)` is built on
//! finite truncations and checked for the torsion bounds, subdirectness onto
//! symmetric groups and the alternating cutoff.

pub mod certify;
pub mod error;
pub mod freewords;
pub mod perm;
pub mod report;
pub mod selfsim;
pub mod telescope;

pub use error::{Error, Result};
