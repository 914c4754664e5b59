//! Memory footprint and age of information in the memoryless read-copy-update
//! model.
//!
//! A single writer publishes a fresh copy of a shared item at the epochs of a
//! rate `alpha` Poisson process. Readers arrive as a rate `lambda` Poisson
//! process and lock whichever copy is current for an exponential(`mu`) read
//! time. A replaced copy stays in memory until its last reader releases it.
//!
//! The crate provides:
//!
//! * [`analytics`]: the exact expected number of active copies `E[N]`, its
//!   two upper bounds, the average age `2/alpha`, and the per-copy grace
//!   period probabilities through two independent numerical routes.
//! * [`simulator`]: a discrete-event simulation of the same process with
//!   batch-means confidence intervals.
//! * [`validation`]: Monte Carlo and density oracles used to check the closed
//!   forms.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line and parallel sweeps live in the companion `rcu-age-cli` crate.

#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` is used on purpose so NaN lands on the error path.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod analytics;
mod error;
pub mod model;
pub mod quadrature;
pub mod rng;
pub mod simulator;
pub mod special;
pub mod validation;

pub use error::{Error, Result};
pub use model::{b_k, validate, DerivedParams, ModelParams, SeriesControl};
pub use rng::RandomSource;
