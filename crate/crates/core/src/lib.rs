//! Steady-state flow of hydrogen / natural gas blends on pipeline networks.

// `!(x > 0.0)` is used on purpose so that NaN takes the error branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod eos;
pub mod error;
pub mod gasprops;
pub mod io;
pub mod network;
pub mod pipeflow;
pub mod quad;
pub mod solver;

pub use error::{Error, Result};
