//! Error exponents of agnostic PAC learning: exact ERM for threshold
//! classes, the structure of the learning problem, KL-projection rates and
//! Monte Carlo estimates of the error probability.

pub mod error;
pub mod exponent;
pub mod hypothesis;
pub mod montecarlo;
pub mod piecewise;
pub mod structure;

pub use error::{Error, Result};
