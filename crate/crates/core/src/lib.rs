//! Best-of-N gradient Bayesian optimization.
//!
//! The crate is organised around the pieces of the optimizer:
//!
//! - [`objective`]: synthetic embedding-space objectives (mean and deviation
//!   fields with analytic gradients), sphere sampling and the first-order edit.
//! - [`order_stats`]: standard-normal quantiles and Gaussian maxima statistics.
//! - [`bon`]: candidate generation, oracle and tournament selection, and the
//!   Monte Carlo statistics that tie Best-of-N selection to UCB ascent.
//! - [`gp`]: Gaussian-process posterior, UCB acquisition, multi-start ascent
//!   and the GP-UCB reference loop with regret bookkeeping.
//! - [`orchestrator`]: the multi-trajectory loop over abstract critic and
//!   evaluator backends, with a synthetic and a scripted text backend.
//! - [`arms`]: best/worst arm identification and probability-weighted scores.

// Parameter guards are written `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arms;
pub mod bon;
pub mod error;
pub mod gp;
pub mod objective;
pub mod orchestrator;
pub mod order_stats;
pub mod rng;

pub use error::{Error, Result};
pub use objective::{EmbeddingPoint, ObjectiveModel, UnitDirection};
