//! Collections of data tables as measures on products of finite metric
//! spaces: exact join feasibility, horn filling, Wasserstein filtrations and
//! obstruction cocycles, all decided by exact rational linear programming.

pub mod cli;
pub mod error;
pub mod joins;
pub mod lp;
pub mod measures;
pub mod obstruction;
pub mod rational;
pub mod schema;
pub mod simpattr;
pub mod transport;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use rational::Rational;
