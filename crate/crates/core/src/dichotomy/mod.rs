//! YES/NO distributions over `F x [q]^k`, their marginals, and one-wise
//! independence decisions.

pub mod construct;
pub mod distribution;
pub mod onewise;
pub mod search;

pub use construct::{check_no_bound, construct_and_check, construct_yes_no, product_rounding_value, NoBound, YesNoPair};
pub use distribution::{marginal_vector, no_value, yes_value, MarginalVector, PairDistribution, SymbolKernel};
pub use onewise::{
    onewise_lp, onewise_support, onewise_witnesses, support_classification, support_classification_with,
    ClassificationLimits, OnewiseSupport, SupportClass,
};
pub use search::{no_sup_search, SupSearch, DEFAULT_NO_SEARCH_BUDGET, KERNEL_LATTICE};
