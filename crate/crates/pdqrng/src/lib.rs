//! Desk-scale simulator and analysis pipeline for a phase-diffusion
//! quantum random number generator: a gain-switched laser feeds an
//! unbalanced interferometer whose output is digitized, certified for
//! min-entropy, and hashed down to certified random bits.

// validation guards are written `!(x > 0.0)` on purpose: unlike `x <= 0.0`
// the negated form also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bits;
pub mod config;
pub mod entropy;
pub mod error;
pub mod extractor;
pub mod interferometer;
pub mod io;
pub mod laser;
pub mod pipeline;
pub mod rng;
pub mod stats;

pub use error::Error;
