//! From a basic-LP solution to a YES/NO pair with matching marginals.

use std::collections::BTreeMap;

use crate::basic_lp::LocalDistributionSolution;
use crate::csp::brute::{brute_force_opt, DEFAULT_BRUTE_FORCE_BUDGET};
use crate::csp::instance::Instance;
use crate::dichotomy::distribution::{
    marginal_vector, yes_value, MarginalVector, PairDistribution, SymbolKernel,
};
use crate::dichotomy::search::{no_sup_search, SupSearch, DEFAULT_NO_SEARCH_BUDGET};
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YesNoPair {
    pub d_yes: PairDistribution,
    pub d_no: PairDistribution,
    /// Shared by both distributions.
    pub marginals: MarginalVector,
}

/// Result of checking the NO side against `opt^CSP`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NoBound {
    pub csp_opt: Rational,
    pub search: SupSearch,
}

/// `D^YES` draws `C` with probability `w_C / W` and then `a ~ Y_C`; `D^NO`
/// draws `C` the same way and each `a_l ~ X_{j_l}` independently.
pub fn yes_no_distributions(
    inst: &Instance,
    sol: &LocalDistributionSolution,
) -> Result<(PairDistribution, PairDistribution)> {
    let space = inst.family().space();
    let mut yes: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    let mut no: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    for (ci, c) in inst.constraints().iter().enumerate() {
        let w = inst.weight_fraction(ci);
        for (a, p) in sol.local[ci].iter().enumerate() {
            if !p.is_zero() {
                *yes.entry((c.predicate, a)).or_insert_with(Rational::zero) += &w * p;
            }
        }
        for a in 0..space.len() {
            let mut prod = w.clone();
            for (pos, &var) in c.vars.iter().enumerate() {
                let x = &sol.marginals[var][space.symbol(a, pos)];
                if x.is_zero() {
                    prod = Rational::zero();
                    break;
                }
                prod = prod * x;
            }
            if !prod.is_zero() {
                *no.entry((c.predicate, a)).or_insert_with(Rational::zero) += prod;
            }
        }
    }
    let fam = inst.family_arc().clone();
    Ok((
        PairDistribution::new(fam.clone(), yes)?,
        PairDistribution::new(fam, no)?,
    ))
}

/// Builds `(D^YES, D^NO)` and checks `mu(D^YES) = mu(D^NO)` and
/// `yes_value(D^YES) = sol.value` exactly.
pub fn construct_yes_no(inst: &Instance, sol: &LocalDistributionSolution) -> Result<YesNoPair> {
    sol.verify(inst)?;
    let (d_yes, d_no) = yes_no_distributions(inst, sol)?;
    let mu_yes = marginal_vector(&d_yes);
    let mu_no = marginal_vector(&d_no);
    if let Some((f, l, s)) = mu_yes.first_mismatch(&mu_no) {
        return Err(Error::Internal(format!("marginal mismatch at ({f},{l},{s})")));
    }
    let yv = yes_value(&d_yes);
    if yv != sol.value {
        return Err(Error::Internal(format!("yes_value {yv} differs from LP value {}", sol.value)));
    }
    Ok(YesNoPair {
        d_yes,
        d_no,
        marginals: mu_yes,
    })
}

/// Expected value of the product assignment `z_i ~ sum_b X_i(b) P_b`.
pub fn product_rounding_value(inst: &Instance, sol: &LocalDistributionSolution, kernel: &SymbolKernel) -> Rational {
    let fam = inst.family();
    let space = fam.space();
    let q = space.q;
    let z: Vec<Vec<Rational>> = sol
        .marginals
        .iter()
        .map(|x| {
            (0..q)
                .map(|t| (0..q).map(|b| &x[b] * &kernel.row(b)[t]).sum())
                .collect()
        })
        .collect();
    let mut total = Rational::zero();
    for (ci, c) in inst.constraints().iter().enumerate() {
        let pred = fam.predicate(c.predicate);
        let mut sat = Rational::zero();
        for t in pred.satisfying() {
            let mut prod = Rational::one();
            for (pos, &var) in c.vars.iter().enumerate() {
                prod = prod * &z[var][space.symbol(t, pos)];
            }
            sat += prod;
        }
        total += sat * inst.weight_fraction(ci);
    }
    total
}

/// Checks `no_value(D^NO, P) <= csp_opt` along two routes: the kernel found by
/// [`no_sup_search`], and the product-rounding identity for that kernel.
/// `csp_opt` must be the true optimum of `inst`.
pub fn check_no_bound(
    inst: &Instance,
    sol: &LocalDistributionSolution,
    d_no: &PairDistribution,
    csp_opt: &Rational,
    budget: u64,
    seed: u64,
) -> Result<NoBound> {
    let search = no_sup_search(d_no, budget, seed);
    if search.bound > *csp_opt {
        return Err(Error::NoBoundViolated {
            found: search.bound.clone(),
            bound: csp_opt.clone(),
        });
    }
    let rounded = product_rounding_value(inst, sol, &search.kernel);
    if rounded != search.bound {
        return Err(Error::Internal(format!(
            "no_value {} differs from product rounding value {rounded}",
            search.bound
        )));
    }
    Ok(NoBound {
        csp_opt: csp_opt.clone(),
        search,
    })
}

/// [`construct_yes_no`] followed by [`check_no_bound`] against a brute-force
/// optimum, with default budgets.
pub fn construct_and_check(inst: &Instance, sol: &LocalDistributionSolution, seed: u64) -> Result<(YesNoPair, NoBound)> {
    let pair = construct_yes_no(inst, sol)?;
    let (opt, _) = brute_force_opt(inst, DEFAULT_BRUTE_FORCE_BUDGET)?;
    let bound = check_no_bound(inst, sol, &pair.d_no, &opt, DEFAULT_NO_SEARCH_BUDGET, seed)?;
    Ok((pair, bound))
}
