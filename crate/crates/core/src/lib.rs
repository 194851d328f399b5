//! Discrete Bayesian-network classifiers.
//!
//! Four learners share one pipeline: pick a structure ([`learners`]), fit
//! conditional probability tables from counts ([`model`]), then classify by
//! the class posterior under complete evidence. [`eval`] measures accuracy
//! and hosts the threshold-searching wrapper; [`bif`] reads and writes the
//! BIF 0.15 interchange text.

pub mod bif;
pub mod data;
pub mod error;
pub mod eval;
pub mod graph;
pub mod infotheory;
pub mod learners;
pub mod model;

pub use error::{Error, Result};
