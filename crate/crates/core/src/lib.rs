//! Desk-scale laboratory for epistemic uncertainty in binary classification.
//!
//! A from-scratch feedforward network ([`nn`]) feeds three uncertainty
//! predictors ([`predictors`]): Monte-Carlo dropout, a randomized deep
//! ensemble, and an ensemble whose members are each evaluated with MC
//! dropout. Their outputs are scored by [`metrics`], and [`harness`] runs
//! complete, seed-reproducible studies and writes report files.

pub mod data;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod nn;
pub mod predictors;
pub mod rng;

pub use error::{Result, UqError};
