//! Predicate families, instances and their exact combinatorial quantities.

pub mod brute;
pub mod builders;
pub mod family;
pub mod instance;
pub mod io;
pub mod rho;
pub mod width;

pub use brute::{brute_force_opt, DEFAULT_BRUTE_FORCE_BUDGET};
pub use family::{families, Predicate, PredicateFamily, TupleSpace};
pub use instance::{csp_value, Assignment, Constraint, Instance};
pub use rho::{rho_product_lower, rho_upper_empirical, RhoLower, RhoUpper};
pub use width::{width, PredicateWidth, WidthReport};
