//! Disorder robustness of quantum Fisher information for pure-state probes.

pub mod error;
pub mod kitaev;
pub mod monte_carlo;
pub mod operator;
pub mod probe;
pub mod expansion;
pub mod qfi;
pub mod single_qubit;

pub use error::{Error, Result};
