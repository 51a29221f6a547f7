//! Sum-level sets of continued fractions: exact Stern–Brocot enumeration,
//! Farey transfer operators, pressure partition sums and digit statistics.

pub mod error;
pub mod cli;
pub mod diophantine;
pub mod exact_kernel;
pub mod numeric;
pub mod pressure;
pub mod sum_level;
pub mod transfer_operator;

pub use error::{Error, Guards, Result};
