//! Numerical laboratory for the log-characteristic-polynomial field of the
//! Ginibre ensemble and its Gaussian free field limit on the unit disk,
//! expressed in the Dirichlet eigenbasis of the disk.

pub mod basis;
pub mod error;
pub mod ginibre;
pub mod limit_field;
pub mod log_kernel;
pub mod quadrature;
pub mod specfun;
pub mod statistics;
pub mod summation;

pub use error::{Error, Result};
