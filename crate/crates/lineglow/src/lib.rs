//! File formats, parallel scene construction, synthetic datasets, the
//! fidelity and scaling harnesses, and the local HTTP service around
//! `lineglow-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod chart;
pub mod config;
mod error;
pub mod export;
pub mod fidelity;
pub mod io;
pub mod parallel;
pub mod service;
pub mod synth;

pub use error::{Error, Result};
