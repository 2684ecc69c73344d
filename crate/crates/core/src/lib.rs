#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod deficits;
pub mod catalog;
pub mod cli;
pub mod domain;
pub mod error;
pub mod exact_oracle;
pub mod functionals;
pub mod lifting;
pub mod optimize;
pub mod poincare;
pub mod poly;
pub mod projection;
pub mod quadrature;
pub mod report;
pub mod stability;
pub mod suites;
pub mod sweep;
pub mod tolerances;

pub use error::{Error, Result};
