//! The basic LP of an instance and its local-distribution view.
//!
//! Variables are `x[i,b]` (per CSP variable `i` and symbol `b`) followed by
//! `y[C,a]` (per constraint `C` and local tuple `a`). The first `n` rows say
//! each `x[i,.]` sums to one; the rest tie coordinate `l` of `y[C,.]` to
//! `x[j_l,.]`. The objective averages constraint satisfaction with weights
//! `w_C / W`, which makes it agree with the CSP value on integral points.

use std::collections::BTreeMap;

use crate::csp::brute::brute_force_opt;
use crate::csp::family::{Predicate, TupleSpace};
use crate::csp::instance::{csp_value, Assignment, Instance};
use crate::csp::width::{predicate_width, shift};
use crate::error::{Error, Result};
use crate::lp::{self, LpProblem};
use crate::rational::Rational;

/// A basic-LP variable decoded from its label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpVar {
    /// `x[i,b]`, 0-based variable and symbol.
    Marginal { var: usize, symbol: usize },
    /// `y[C,a]`, 0-based constraint and tuple index.
    Local { constraint: usize, tuple: usize },
}

/// The basic LP of one instance together with its variable layout.
#[derive(Clone, Debug)]
pub struct BasicLp {
    problem: LpProblem,
    n: usize,
    m: usize,
    space: TupleSpace,
}

impl BasicLp {
    pub fn problem(&self) -> &LpProblem {
        &self.problem
    }

    pub fn x_index(&self, var: usize, symbol: usize) -> usize {
        var * self.space.q + symbol
    }

    pub fn y_index(&self, constraint: usize, tuple: usize) -> usize {
        self.n * self.space.q + constraint * self.space.len() + tuple
    }

    pub fn num_simplex_rows(&self) -> usize {
        self.n
    }

    pub fn num_consistency_rows(&self) -> usize {
        self.m * self.space.k * self.space.q
    }

    pub fn parse_label(&self, label: &str) -> Option<LpVar> {
        let inner = |prefix: &str| {
            label
                .strip_prefix(prefix)?
                .strip_suffix(']')?
                .split_once(',')
        };
        if let Some((i, b)) = inner("x[") {
            let var = i.parse::<usize>().ok()?.checked_sub(1)?;
            let symbol = b.parse::<usize>().ok()?;
            (var < self.n && symbol < self.space.q).then_some(LpVar::Marginal { var, symbol })
        } else if let Some((c, a)) = inner("y[") {
            let constraint = c.parse::<usize>().ok()?.checked_sub(1)?;
            let tuple = self.space.parse_digits(a)?;
            (constraint < self.m).then_some(LpVar::Local { constraint, tuple })
        } else {
            None
        }
    }

    /// Reads local distributions and marginals out of a primal vector indexed
    /// by this LP's variables. The result is not yet verified.
    pub fn decode(&self, inst: &Instance, primal: &[Rational]) -> Result<LocalDistributionSolution> {
        if primal.len() != self.problem.num_vars() {
            return Err(Error::Internal(format!(
                "primal has {} entries, LP has {} variables",
                primal.len(),
                self.problem.num_vars()
            )));
        }
        let q = self.space.q;
        let t = self.space.len();
        let marginals = (0..self.n)
            .map(|i| primal[self.x_index(i, 0)..self.x_index(i, 0) + q].to_vec())
            .collect();
        let local = (0..self.m)
            .map(|c| primal[self.y_index(c, 0)..self.y_index(c, 0) + t].to_vec())
            .collect();
        let mut sol = LocalDistributionSolution {
            local,
            marginals,
            value: Rational::zero(),
        };
        sol.value = sol.objective(inst);
        Ok(sol)
    }

    /// Inverse of [`BasicLp::decode`].
    pub fn encode(&self, sol: &LocalDistributionSolution) -> Vec<Rational> {
        let mut x = Vec::with_capacity(self.problem.num_vars());
        for xi in &sol.marginals {
            x.extend(xi.iter().cloned());
        }
        for yc in &sol.local {
            x.extend(yc.iter().cloned());
        }
        x
    }
}

pub fn build_basic_lp(inst: &Instance) -> BasicLp {
    let fam = inst.family();
    let space = fam.space();
    let (q, k, t) = (space.q, space.k, space.len());
    let n = inst.n();
    let m = inst.m();

    let mut labels = Vec::with_capacity(n * q + m * t);
    let mut objective = Vec::with_capacity(n * q + m * t);
    for i in 0..n {
        for b in 0..q {
            labels.push(format!("x[{},{b}]", i + 1));
            objective.push(Rational::zero());
        }
    }
    for (ci, c) in inst.constraints().iter().enumerate() {
        let pred = fam.predicate(c.predicate);
        let wfrac = inst.weight_fraction(ci);
        for a in 0..t {
            labels.push(format!("y[{},{}]", ci + 1, space.digits(a)));
            objective.push(if pred.eval(a) { wfrac.clone() } else { Rational::zero() });
        }
    }
    let problem = LpProblem::new(labels, objective).expect("labels are unique by construction");
    let mut lp = BasicLp {
        problem,
        n,
        m,
        space,
    };

    for i in 0..n {
        let terms: Vec<_> = (0..q).map(|b| (lp.x_index(i, b), Rational::one())).collect();
        lp.problem
            .add_sparse_row(&terms, Rational::one())
            .expect("indices in range");
    }
    for (ci, c) in inst.constraints().iter().enumerate() {
        for (pos, &var) in c.vars.iter().enumerate() {
            for b in 0..q {
                let mut terms: Vec<_> = (0..t)
                    .filter(|&a| space.symbol(a, pos) == b)
                    .map(|a| (lp.y_index(ci, a), Rational::one()))
                    .collect();
                terms.push((lp.x_index(var, b), -Rational::one()));
                lp.problem
                    .add_sparse_row(&terms, Rational::zero())
                    .expect("indices in range");
            }
        }
    }
    debug_assert_eq!(lp.problem.num_rows(), n + m * k * q);
    lp
}

/// Per-constraint local distributions `Y_C` and per-variable marginals `X_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalDistributionSolution {
    /// `local[C][a]`, indexed by tuple code.
    pub local: Vec<Vec<Rational>>,
    /// `marginals[i][b]`.
    pub marginals: Vec<Vec<Rational>>,
    pub value: Rational,
}

fn is_distribution(p: &[Rational]) -> bool {
    p.iter().all(|v| !v.is_negative()) && p.iter().sum::<Rational>().is_one()
}

impl LocalDistributionSolution {
    /// `E_{C ~ w} E_{a ~ Y_C} f_C(a)`.
    pub fn objective(&self, inst: &Instance) -> Rational {
        let fam = inst.family();
        let mut total = Rational::zero();
        for (c, yc) in inst.constraints().iter().zip(&self.local) {
            let pred = fam.predicate(c.predicate);
            let sat: Rational = pred.satisfying().map(|a| &yc[a]).sum();
            total += sat * Rational::from(c.weight);
        }
        total / Rational::from(inst.total_weight())
    }

    /// Checks every invariant exactly; the error names the first violation.
    pub fn verify(&self, inst: &Instance) -> Result<()> {
        let space = inst.family().space();
        let fail = |msg: String| Err(Error::Verification(msg));
        if self.local.len() != inst.m() || self.marginals.len() != inst.n() {
            return fail(format!(
                "shape: {} local distributions for {} constraints, {} marginals for {} variables",
                self.local.len(),
                inst.m(),
                self.marginals.len(),
                inst.n()
            ));
        }
        for (i, xi) in self.marginals.iter().enumerate() {
            if xi.len() != space.q || !is_distribution(xi) {
                return fail(format!("X_{} is not a distribution over [q]", i + 1));
            }
        }
        for (ci, (c, yc)) in inst.constraints().iter().zip(&self.local).enumerate() {
            if yc.len() != space.len() || !is_distribution(yc) {
                return fail(format!("Y_{} is not a distribution over [q]^k", ci + 1));
            }
            for (pos, &var) in c.vars.iter().enumerate() {
                let mut marg = vec![Rational::zero(); space.q];
                for (a, p) in yc.iter().enumerate() {
                    if !p.is_zero() {
                        marg[space.symbol(a, pos)] += p;
                    }
                }
                if let Some(b) = (0..space.q).find(|&b| marg[b] != self.marginals[var][b]) {
                    return fail(format!(
                        "consistency: coordinate {} of Y_{} has mass {} on {b}, X_{} has {}",
                        pos + 1,
                        ci + 1,
                        marg[b],
                        var + 1,
                        self.marginals[var][b]
                    ));
                }
            }
        }
        let obj = self.objective(inst);
        if obj != self.value {
            return fail(format!("objective: stated {} but distributions give {obj}", self.value));
        }
        Ok(())
    }

    /// The point-mass solution induced by an assignment.
    pub fn from_assignment(inst: &Instance, a: &Assignment) -> Result<Self> {
        a.check(inst)?;
        let space = inst.family().space();
        let marginals = a
            .values()
            .iter()
            .map(|&v| {
                (0..space.q)
                    .map(|b| if b == v as usize { Rational::one() } else { Rational::zero() })
                    .collect()
            })
            .collect();
        let local = inst
            .constraints()
            .iter()
            .map(|c| {
                let code = inst.local_code(c, a.values());
                (0..space.len())
                    .map(|t| if t == code { Rational::one() } else { Rational::zero() })
                    .collect()
            })
            .collect();
        let mut sol = LocalDistributionSolution {
            local,
            marginals,
            value: Rational::zero(),
        };
        sol.value = sol.objective(inst);
        Ok(sol)
    }
}

/// `opt^LP` with an optimal solution in the distributional view.
pub fn solve_basic_lp(inst: &Instance) -> Result<LocalDistributionSolution> {
    let lp = build_basic_lp(inst);
    let opt = lp::solve(lp.problem())?.into_optimum()?;
    let sol = lp.decode(inst, &opt.primal)?;
    if sol.value != opt.value {
        return Err(Error::Internal(format!(
            "decoded objective {} differs from LP value {}",
            sol.value, opt.value
        )));
    }
    sol.verify(inst)
        .map_err(|e| Error::Internal(format!("decoded LP solution: {e}")))?;
    Ok(sol)
}

/// `(opt^LP, opt^CSP)` with witnesses for both.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapReport {
    pub lp_value: Rational,
    pub csp_value: Rational,
    pub csp_witness: Assignment,
    pub lp_witness: LocalDistributionSolution,
}

impl GapReport {
    /// Completeness `opt^LP >= gamma` and soundness `opt^CSP <= beta`.
    pub fn is_gap(&self, gamma: &Rational, beta: &Rational) -> bool {
        self.lp_value >= *gamma && self.csp_value <= *beta
    }
}

pub fn gap_report(inst: &Instance, brute_budget: u64) -> Result<GapReport> {
    let (csp, witness) = brute_force_opt(inst, brute_budget)?;
    let sol = solve_basic_lp(inst)?;
    if sol.value < csp {
        return Err(Error::Internal(format!(
            "LP value {} below CSP optimum {csp}",
            sol.value
        )));
    }
    debug_assert_eq!(csp_value(inst, &witness)?, csp);
    Ok(GapReport {
        lp_value: sol.value.clone(),
        csp_value: csp,
        csp_witness: witness,
        lp_witness: sol,
    })
}

/// True when `dist` is supported on `pred`'s satisfying tuples and every
/// coordinate marginal is uniform.
pub fn is_onewise_witness(pred: &Predicate, space: TupleSpace, dist: &[Rational]) -> bool {
    if dist.len() != space.len() || !is_distribution(dist) {
        return false;
    }
    if dist.iter().enumerate().any(|(a, p)| !p.is_zero() && !pred.eval(a)) {
        return false;
    }
    let target = Rational::new(1, space.q as i64);
    (0..space.k).all(|pos| {
        let mut marg = vec![Rational::zero(); space.q];
        for (a, p) in dist.iter().enumerate() {
            marg[space.symbol(a, pos)] += p;
        }
        marg.iter().all(|v| *v == target)
    })
}

fn uniform(q: usize) -> Vec<Rational> {
    vec![Rational::new(1, q as i64); q]
}

/// Sets every `Y_C` to the one-wise witness of its predicate and every `X_i`
/// to uniform. The result has value exactly one.
pub fn lp_from_onewise(
    inst: &Instance,
    witnesses: &BTreeMap<String, Vec<Rational>>,
) -> Result<LocalDistributionSolution> {
    let fam = inst.family();
    let space = fam.space();
    let mut local = Vec::with_capacity(inst.m());
    for c in inst.constraints() {
        let pred = fam.predicate(c.predicate);
        let dist = witnesses
            .get(pred.name())
            .ok_or_else(|| Error::MissingWitness(pred.name().to_string()))?;
        if !is_onewise_witness(pred, space, dist) {
            return Err(Error::InvalidArgument(format!(
                "distribution given for {:?} is not a one-wise witness",
                pred.name()
            )));
        }
        local.push(dist.clone());
    }
    let sol = LocalDistributionSolution {
        local,
        marginals: vec![uniform(space.q); inst.n()],
        value: Rational::one(),
    };
    sol.verify(inst)?;
    Ok(sol)
}

/// Sets every `Y_C` uniform over the constant shifts of the width-maximising
/// base point of its predicate and every `X_i` to uniform. Constraint `C`
/// then contributes exactly `w(f_C)`.
pub fn lp_from_width(inst: &Instance) -> Result<LocalDistributionSolution> {
    let fam = inst.family();
    let space = fam.space();
    let q = space.q;
    let per_pred: Vec<Vec<Rational>> = fam
        .predicates()
        .iter()
        .map(|p| {
            let base = predicate_width(p, space).base;
            let mut dist = vec![Rational::zero(); space.len()];
            for a in 0..q as u8 {
                dist[space.encode(&shift(&base, a, q))] = Rational::new(1, q as i64);
            }
            dist
        })
        .collect();
    let local = inst
        .constraints()
        .iter()
        .map(|c| per_pred[c.predicate].clone())
        .collect();
    let mut sol = LocalDistributionSolution {
        local,
        marginals: vec![uniform(q); inst.n()],
        value: Rational::zero(),
    };
    sol.value = sol.objective(inst);
    sol.verify(inst)?;
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::csp::builders::{cycle, single_edge, triangle};
    use crate::csp::family::families;
    use crate::csp::instance::Constraint;

    fn cut_witness() -> BTreeMap<String, Vec<Rational>> {
        let h = Rational::new(1, 2);
        let z = Rational::zero();
        BTreeMap::from([("cut".to_string(), vec![z.clone(), h.clone(), h, z])])
    }

    #[test]
    fn variable_counts() {
        let lp = build_basic_lp(&single_edge());
        assert_eq!(lp.problem().num_vars(), 8);
        let lp = build_basic_lp(&cycle(5));
        assert_eq!(lp.problem().num_vars(), 30);
        assert_eq!(lp.num_simplex_rows(), 5);
        assert_eq!(lp.num_consistency_rows(), 20);
        assert_eq!(lp.problem().num_rows(), 25);
    }

    #[test]
    fn objective_coefficients_are_weight_fractions() {
        let fam = Arc::new(families::dicut());
        let inst = Instance::new(
            fam,
            3,
            vec![Constraint::new(0, vec![0, 1], 3), Constraint::new(0, vec![2, 1], 1)],
        )
        .unwrap();
        let lp = build_basic_lp(&inst);
        let c = lp.problem().objective();
        assert_eq!(c[lp.y_index(0, 2)], Rational::new(3, 4));
        assert_eq!(c[lp.y_index(1, 2)], Rational::new(1, 4));
        assert!(c[lp.y_index(0, 1)].is_zero());
        assert!(c[lp.x_index(2, 1)].is_zero());
    }

    #[test]
    fn labels_round_trip() {
        let inst = cycle(5);
        let lp = build_basic_lp(&inst);
        for (j, label) in lp.problem().labels().iter().enumerate() {
            let idx = match lp.parse_label(label).unwrap() {
                LpVar::Marginal { var, symbol } => lp.x_index(var, symbol),
                LpVar::Local { constraint, tuple } => lp.y_index(constraint, tuple),
            };
            assert_eq!(idx, j, "{label}");
        }
        assert_eq!(lp.parse_label("x[0,1]"), None);
        assert_eq!(lp.parse_label("y[6,01]"), None);
        assert_eq!(lp.parse_label("z[1,1]"), None);
    }

    #[test]
    fn solved_values() {
        assert_eq!(solve_basic_lp(&cycle(5)).unwrap().value, Rational::one());
        assert_eq!(solve_basic_lp(&triangle()).unwrap().value, Rational::one());
        assert_eq!(solve_basic_lp(&single_edge()).unwrap().value, Rational::one());
    }

    #[test]
    fn gap_reports() {
        let r = gap_report(&cycle(5), 1 << 10).unwrap();
        assert_eq!((r.lp_value.clone(), r.csp_value.clone()), (Rational::one(), Rational::new(4, 5)));
        assert!(r.is_gap(&Rational::one(), &Rational::new(4, 5)));
        assert!(!r.is_gap(&Rational::one(), &Rational::new(1, 2)));
        let e = gap_report(&single_edge(), 1 << 10).unwrap();
        assert_eq!((e.lp_value, e.csp_value), (Rational::one(), Rational::one()));
        let t = gap_report(&triangle(), 1 << 10).unwrap();
        assert_eq!(t.csp_value, Rational::new(2, 3));
    }

    #[test]
    fn onewise_solution() {
        let sol = lp_from_onewise(&cycle(5), &cut_witness()).unwrap();
        assert_eq!(sol.value, Rational::one());
        assert!(matches!(
            lp_from_onewise(&cycle(5), &BTreeMap::new()),
            Err(Error::MissingWitness(_))
        ));
    }

    #[test]
    fn onewise_rejects_empty_support_predicate() {
        let fam = Arc::new(
            crate::csp::family::PredicateFamily::new(2, 2, vec![Predicate::new("never", vec![false; 4])])
                .unwrap(),
        );
        let inst = Instance::new(fam, 2, vec![Constraint::unit(0, vec![0, 1])]).unwrap();
        let bogus = BTreeMap::from([("never".to_string(), vec![Rational::new(1, 4); 4])]);
        assert!(lp_from_onewise(&inst, &bogus).is_err());
        assert!(lp_from_onewise(&inst, &BTreeMap::new()).is_err());
    }

    #[test]
    fn width_solutions() {
        let fam = Arc::new(families::dicut());
        let inst = Instance::new(
            fam,
            3,
            vec![Constraint::unit(0, vec![0, 1]), Constraint::new(0, vec![1, 2], 5)],
        )
        .unwrap();
        assert_eq!(lp_from_width(&inst).unwrap().value, Rational::new(1, 2));
        assert_eq!(lp_from_width(&cycle(4)).unwrap().value, Rational::one());
        let one = Arc::new(families::constant_one(3, 2));
        let inst = Instance::new(one, 2, vec![Constraint::unit(0, vec![1, 0])]).unwrap();
        assert_eq!(lp_from_width(&inst).unwrap().value, Rational::one());
    }

    #[test]
    fn integral_embedding() {
        let inst = cycle(5);
        let a = Assignment(vec![0, 1, 0, 1, 1]);
        let sol = LocalDistributionSolution::from_assignment(&inst, &a).unwrap();
        sol.verify(&inst).unwrap();
        assert_eq!(sol.value, csp_value(&inst, &a).unwrap());
        let lp = build_basic_lp(&inst);
        assert!(lp.problem().is_feasible_point(&lp.encode(&sol)));
    }

    #[test]
    fn verify_detects_perturbation() {
        let inst = cycle(5);
        let mut sol = lp_from_onewise(&inst, &cut_witness()).unwrap();
        sol.local[2][1] += Rational::new(1, 1000);
        sol.local[2][2] -= Rational::new(1, 1000);
        let err = sol.verify(&inst).unwrap_err().to_string();
        assert!(err.contains("consistency"), "{err}");
    }
}
