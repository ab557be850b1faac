//! Analysis of finite CSP predicate families through the basic LP relaxation.
//!
//! The crate is organised bottom-up:
//!
//! - [`rational`]: exact arithmetic used for every reported value.
//! - [`csp`]: predicate families, instances, exact values, brute-force
//!   optima, trivial-threshold brackets and widths.
//! - [`lp`]: an exact two-phase simplex solver with certificates, plus a
//!   vertex-enumeration oracle for testing it.
//! - [`basic_lp`]: the basic LP of an instance, its local-distribution view,
//!   gap reports and the two constructive LP solutions (one-wise and width).
//! - [`dichotomy`]: distributions over predicate/tuple pairs, marginal
//!   vectors, YES/NO values and the construction of matched-marginal pairs.
//! - [`gap`]: instance enumeration, gap search and certificates.

pub mod basic_lp;
pub mod csp;
pub mod dichotomy;
pub mod error;
pub mod gap;
pub mod lp;
pub mod parallel;
pub mod rational;

pub use error::{Error, Result};
pub use rational::Rational;

/// Version string embedded in certificates.
pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");
