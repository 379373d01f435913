//! Independent verification engines for the closed-form model.
//!
//! Each engine touches the model only through the joint law or its
//! conditional structure, never through the loss-pmf formula, so agreement
//! with [`crate::distribution`] is a genuine cross-check.

mod enumerate;
mod maxent;
mod sample;

pub use enumerate::{enumerate, EnumeratedMoments, EnumerationReport, MAX_ENUM_N};
pub use maxent::{maxent_fit_small, FitOptions, MaxEntFit, MaxEntProblem, MAX_FIT_N};
pub use sample::{loss_histogram, sample, total_variation, Draw, GENERATOR, SHARD_SIZE};
