//! Exact p-adic dynamics of (2,2)-rational maps with two fixed points.

pub mod classify;
pub mod ergodic;
pub mod error;
pub mod map;
pub mod norm;
pub mod padic;
pub mod report;
pub mod suites;

pub use error::{Error, Result};
pub use padic::{LogRadius, Prime, Rational, TruncatedPadicInt, Valuation};
