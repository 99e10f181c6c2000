//! Causal structure learning from mixed-type data.
//!
//! Builds a pseudo-correlation matrix from per-variable kernel matrices
//! (RBF for continuous/ordinal columns, a categorical kernel for
//! binary/categorical columns) via kernel alignment, then runs PC or FCI
//! with Fisher-z conditional-independence tests on top of it. Ships with
//! a mixed-data simulator and an SHD benchmark harness.

pub mod alignment;
pub mod bench;
pub mod citest;
pub mod discovery;
mod error;
pub mod graphs;
pub mod kernels;
pub mod metrics;
pub mod simdata;

pub use error::{Error, Result};
