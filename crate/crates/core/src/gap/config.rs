use std::sync::Arc;

use crate::csp::brute::DEFAULT_BRUTE_FORCE_BUDGET;
use crate::csp::family::PredicateFamily;
use crate::dichotomy::search::DEFAULT_NO_SEARCH_BUDGET;
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    /// Every constraint multiset, sorted, with unit weights.
    Exhaustive,
    /// Seeded uniform sampling.
    Random,
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub family: Arc<PredicateFamily>,
    pub n_min: usize,
    pub n_max: usize,
    pub max_constraints: usize,
    pub mode: SearchMode,
    pub seed: u64,
    /// Maximum number of instances evaluated.
    pub budget: u64,
    pub gamma: Rational,
    pub beta: Rational,
    /// Track the largest `opt^LP - opt^CSP` instead of stopping at the first hit.
    pub maximize_gap: bool,
    pub brute_force_budget: u64,
    pub no_search_budget: u64,
}

impl SearchConfig {
    /// Defaults: `n` from `k` to `k + 3`, at most 8 constraints, exhaustive,
    /// seed 0, `gamma = 1`, `beta = 0`.
    pub fn new(family: Arc<PredicateFamily>) -> Self {
        let k = family.k();
        SearchConfig {
            family,
            n_min: k,
            n_max: k + 3,
            max_constraints: 8,
            mode: SearchMode::Exhaustive,
            seed: 0,
            budget: 1_000_000,
            gamma: Rational::one(),
            beta: Rational::zero(),
            maximize_gap: false,
            brute_force_budget: DEFAULT_BRUTE_FORCE_BUDGET,
            no_search_budget: DEFAULT_NO_SEARCH_BUDGET,
        }
    }

    /// Checks the fields that shape the instance stream.
    pub fn validate_stream(&self) -> Result<()> {
        let k = self.family.k();
        if self.n_min < k {
            return Err(Error::InvalidArgument(format!(
                "n_min = {} is below the arity {k}",
                self.n_min
            )));
        }
        if self.n_min > self.n_max {
            return Err(Error::InvalidArgument(format!(
                "empty n range {}..={}",
                self.n_min, self.n_max
            )));
        }
        if self.max_constraints == 0 {
            return Err(Error::InvalidArgument("max_constraints must be positive".into()));
        }
        if self.budget == 0 {
            return Err(Error::InvalidArgument("budget must be positive".into()));
        }
        Ok(())
    }

    /// Full validation, including `0 <= beta < gamma <= 1`.
    pub fn validate(&self) -> Result<()> {
        self.validate_stream()?;
        validate_thresholds(&self.gamma, &self.beta)
    }
}

pub fn validate_thresholds(gamma: &Rational, beta: &Rational) -> Result<()> {
    if beta.is_negative() || beta >= gamma || *gamma > Rational::one() {
        return Err(Error::InvalidArgument(format!(
            "thresholds must satisfy 0 <= beta < gamma <= 1, got gamma = {gamma}, beta = {beta}"
        )));
    }
    Ok(())
}
