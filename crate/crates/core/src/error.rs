use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid predicate family: {0}")]
    InvalidFamily(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid assignment: {0}")]
    InvalidAssignment(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} needs {needed} evaluations but the budget is {budget}")]
    BudgetExceeded {
        what: &'static str,
        needed: u128,
        budget: u128,
    },

    #[error("budget of {budget} exhausted after {evaluated} evaluations: {what}")]
    BudgetExhausted {
        what: &'static str,
        budget: u64,
        evaluated: u64,
    },

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("no one-wise witness for predicate {0:?}")]
    MissingWitness(String),

    #[error("internal consistency violation: {0}")]
    Internal(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("no-side bound violated: kernel reaches {found} > {bound}")]
    NoBoundViolated { found: Rational, bound: Rational },

    #[error("{path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
