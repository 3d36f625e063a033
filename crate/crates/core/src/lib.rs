//! Simulation toolkit for delayed-choice entanglement swapping with a tunable
//! family of Victor measurement bases, from product states to Bell states.

pub mod error;
pub mod qstate;
pub mod rng;

pub use error::{Error, Result};
pub mod chsh;
pub mod cli;
pub mod delayed;
pub mod estimator;
pub mod infometrics;
mod optimize;
pub mod output;
pub mod swapkit;
