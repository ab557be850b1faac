use std::collections::BTreeMap;
use std::sync::Arc;

use crate::basic_lp::is_onewise_witness;
use crate::csp::family::{Predicate, PredicateFamily, TupleSpace};
use crate::csp::rho::{rho_product_lower, rho_upper_empirical};
use crate::error::{Error, Result};
use crate::lp::{check_feasible, FarkasCertificate, Feasibility, LpProblem};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OnewiseSupport {
    /// Distribution over `[q]^k`, indexed by tuple code.
    Witness(Vec<Rational>),
    /// Infeasibility proof for [`onewise_lp`].
    Refused(FarkasCertificate),
}

impl OnewiseSupport {
    pub fn witness(&self) -> Option<&[Rational]> {
        match self {
            OnewiseSupport::Witness(w) => Some(w),
            OnewiseSupport::Refused(_) => None,
        }
    }
}

/// Feasibility LP: one variable per satisfying tuple, one row per
/// `(position, symbol)` fixing that marginal to `1/q`.
pub fn onewise_lp(pred: &Predicate, space: TupleSpace) -> LpProblem {
    let sat: Vec<usize> = pred.satisfying().collect();
    let labels = sat.iter().map(|&a| format!("p[{}]", space.digits(a))).collect();
    let mut lp = LpProblem::new(labels, vec![Rational::zero(); sat.len()]).expect("distinct tuples");
    let target = Rational::new(1, space.q as i64);
    for pos in 0..space.k {
        for sym in 0..space.q {
            let terms: Vec<_> = sat
                .iter()
                .enumerate()
                .filter(|&(_, &a)| space.symbol(a, pos) == sym)
                .map(|(j, _)| (j, Rational::one()))
                .collect();
            lp.add_sparse_row(&terms, target.clone()).expect("indices in range");
        }
    }
    lp
}

/// Decides whether `pred` supports one-wise independence. Tries the uniform
/// distribution on satisfying tuples first, then exact LP feasibility.
pub fn onewise_support(pred: &Predicate, space: TupleSpace) -> Result<OnewiseSupport> {
    let sat: Vec<usize> = pred.satisfying().collect();
    if !sat.is_empty() {
        let mut uniform = vec![Rational::zero(); space.len()];
        for &a in &sat {
            uniform[a] = Rational::new(1, sat.len() as i64);
        }
        if is_onewise_witness(pred, space, &uniform) {
            return Ok(OnewiseSupport::Witness(uniform));
        }
    }
    let lp = onewise_lp(pred, space);
    match check_feasible(&lp)? {
        Feasibility::Feasible(x) => {
            let mut dist = vec![Rational::zero(); space.len()];
            for (&a, v) in sat.iter().zip(x) {
                dist[a] = v;
            }
            if !is_onewise_witness(pred, space, &dist) {
                return Err(Error::Internal(format!("one-wise witness for {:?} fails its checks", pred.name())));
            }
            Ok(OnewiseSupport::Witness(dist))
        }
        Feasibility::Infeasible(cert) => Ok(OnewiseSupport::Refused(cert)),
    }
}

/// Witnesses for every predicate that has one, keyed by predicate name.
pub fn onewise_witnesses(fam: &PredicateFamily) -> Result<BTreeMap<String, Vec<Rational>>> {
    let mut out = BTreeMap::new();
    for p in fam.predicates() {
        if let OnewiseSupport::Witness(w) = onewise_support(p, fam.space())? {
            out.insert(p.name().to_string(), w);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SupportClass {
    Strong,
    /// Names of a strongly supporting subfamily with the same threshold.
    Weak(Vec<String>),
    None,
    Unknown,
}

impl std::fmt::Display for SupportClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SupportClass::Strong => write!(f, "strong"),
            SupportClass::Weak(names) => write!(f, "weak({})", names.join(",")),
            SupportClass::None => write!(f, "none"),
            SupportClass::Unknown => write!(f, "unknown"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ClassificationLimits {
    /// Maximum number of candidate subfamilies examined.
    pub subfamilies: u64,
    /// Largest instance size for the empirical threshold upper bound.
    pub rho_n_max: usize,
    /// Instances evaluated per empirical upper bound.
    pub rho_budget: u64,
}

impl Default for ClassificationLimits {
    fn default() -> Self {
        ClassificationLimits {
            subfamilies: 1024,
            rho_n_max: 5,
            rho_budget: 256,
        }
    }
}

pub fn support_classification(fam: &Arc<PredicateFamily>, precision: &Rational) -> Result<SupportClass> {
    support_classification_with(fam, precision, &ClassificationLimits::default())
}

/// Strong when every predicate supports one-wise independence. Otherwise
/// candidate subfamilies of supporting predicates are tried largest first:
/// `rho(F') >= rho(F)` always holds, so `upper(F') <= lower(F)` proves
/// equality and `lower(F') > upper(F)` refutes it.
pub fn support_classification_with(
    fam: &Arc<PredicateFamily>,
    precision: &Rational,
    limits: &ClassificationLimits,
) -> Result<SupportClass> {
    let supporting: Vec<usize> = (0..fam.len())
        .filter_map(|i| match onewise_support(fam.predicate(i), fam.space()) {
            Ok(OnewiseSupport::Witness(_)) => Some(Ok(i)),
            Ok(OnewiseSupport::Refused(_)) => None,
            Err(e) => Some(Err(e)),
        })
        .collect::<Result<_>>()?;
    if supporting.len() == fam.len() {
        return Ok(SupportClass::Strong);
    }
    if supporting.is_empty() {
        return Ok(SupportClass::None);
    }
    let s = supporting.len();
    let needed = (1u128 << s.min(127)) - 1;
    if needed > limits.subfamilies as u128 {
        return Err(Error::BudgetExceeded {
            what: "subfamily enumeration",
            needed,
            budget: limits.subfamilies as u128,
        });
    }

    let n_max = limits.rho_n_max.max(fam.k());
    let lower_f = rho_product_lower(fam, precision)?.value;
    let upper_f = rho_upper_empirical(fam, n_max, limits.rho_budget)?.value;

    // Subsets of `supporting`, largest first, then lexicographically.
    let mut subsets: Vec<Vec<usize>> = (1u64..(1 << s))
        .map(|mask| (0..s).filter(|b| mask >> b & 1 == 1).map(|b| supporting[b]).collect())
        .collect();
    subsets.sort_by(|a: &Vec<usize>, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));

    let mut undecided = false;
    for sub in subsets {
        let sub_fam = Arc::new(fam.subfamily(&sub)?);
        let lower_sub = rho_product_lower(&sub_fam, precision)?.value;
        if lower_sub > upper_f {
            continue;
        }
        let upper_sub = rho_upper_empirical(&sub_fam, n_max, limits.rho_budget)?.value;
        if upper_sub <= lower_f {
            let names = sub.iter().map(|&i| fam.predicate(i).name().to_string()).collect();
            return Ok(SupportClass::Weak(names));
        }
        undecided = true;
    }
    Ok(if undecided { SupportClass::Unknown } else { SupportClass::None })
}
