//! Deterministic feedback-loop crowd simulator for wealth-distribution
//! emergence, with closed-form oracles for the trendy regime, a toolkit for
//! analysing distributions, and ingestion of bucketed survey tables.
//!
//! Agents hold wealth `A_i` and respond to the previous aggregate observation
//! with coefficient `b_i`. Each step every agent's decision is weighted by its
//! wealth into an observation `dO`, and wealth is rewarded by how well the
//! decision aligned with the sign of `dO`. See the `examples/` directory for one
//! runnable program per capability.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod closed_form;
pub mod compare;
pub mod ensemble;
pub mod error;
pub mod ingest;
pub mod model;
pub mod output;
pub mod reward;
pub mod scenario;
pub mod stats;

pub use error::{Error, Result};
