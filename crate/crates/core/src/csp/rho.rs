//! Bracketing the trivial approximability threshold.
//!
//! The lower end is the best i.i.d. product assignment,
//! `max_P min_f E_{a ~ P^k} f(a)`, located by a simplex grid plus local
//! ascent and certified by a Lipschitz bound. The upper end is the smallest
//! optimum observed over a deterministic stream of small instances.

use std::sync::Arc;

use crate::csp::brute::{brute_force_opt, DEFAULT_BRUTE_FORCE_BUDGET};
use crate::csp::builders;
use crate::csp::family::PredicateFamily;
use crate::csp::instance::Instance;
use crate::error::{Error, Result};
use crate::gap::config::{SearchConfig, SearchMode};
use crate::gap::enumerate::enumerate_instances;
use crate::rational::Rational;

/// Grid denominator used at the first refinement level.
pub const INITIAL_GRID: u64 = 64;
/// Refinement stops with an error once a grid would exceed this many points.
pub const MAX_GRID_POINTS: u128 = 1 << 22;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RhoLower {
    /// Value of the best distribution found; a lower bound on the maximin.
    pub value: Rational,
    /// The distribution achieving `value`.
    pub distribution: Vec<Rational>,
    /// Certified upper bound on the maximin; `upper - value <= precision`.
    pub upper: Rational,
    pub grid_denominator: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RhoUpper {
    pub value: Rational,
    pub witness: Instance,
    pub evaluated: u64,
}

fn satisfying_tuples(fam: &PredicateFamily) -> Vec<Vec<Vec<u8>>> {
    let space = fam.space();
    fam.predicates()
        .iter()
        .map(|p| p.satisfying().map(|c| space.decode(c)).collect())
        .collect()
}

/// `min_f sum_{a in f^-1(1)} prod_l counts[a_l]`, i.e. the product value scaled
/// by `N^k` for the grid point `counts / N`.
fn scaled_value(sat: &[Vec<Vec<u8>>], counts: &[u64]) -> Option<u128> {
    let mut best: Option<u128> = None;
    for tuples in sat {
        let mut total: u128 = 0;
        for t in tuples {
            let mut prod: u128 = 1;
            for &a in t {
                prod = prod.checked_mul(counts[a as usize] as u128)?;
                if prod == 0 {
                    break;
                }
            }
            total = total.checked_add(prod)?;
        }
        best = Some(best.map_or(total, |b| b.min(total)));
    }
    best
}

fn exact_value(sat: &[Vec<Vec<u8>>], p: &[Rational]) -> Rational {
    sat.iter()
        .map(|tuples| {
            tuples
                .iter()
                .map(|t| t.iter().map(|&a| p[a as usize].clone()).product::<Rational>())
                .sum::<Rational>()
        })
        .min()
        .expect("family is non-empty")
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Visits every composition of `total` into `parts` non-negative parts in
/// lexicographic order.
fn for_each_composition(total: u64, parts: usize, mut visit: impl FnMut(&[u64])) {
    fn rec(rem: u64, idx: usize, cur: &mut Vec<u64>, visit: &mut dyn FnMut(&[u64])) {
        if idx + 1 == cur.len() {
            cur[idx] = rem;
            visit(cur);
            return;
        }
        for v in 0..=rem {
            cur[idx] = v;
            rec(rem - v, idx + 1, cur, visit);
        }
    }
    let mut cur = vec![0u64; parts];
    rec(total, 0, &mut cur, &mut visit);
}

/// Coordinate-pair mass transfers with shrinking step, accepting strict
/// improvements only.
fn local_ascent(sat: &[Vec<Vec<u8>>], start: Vec<Rational>, start_step: Rational) -> (Rational, Vec<Rational>) {
    let q = start.len();
    let mut p = start;
    let mut best = exact_value(sat, &p);
    let mut step = start_step;
    let two = Rational::from_integer(2);
    for _ in 0..12 {
        let mut improved = true;
        let mut rounds = 0;
        while improved && rounds < 64 {
            improved = false;
            rounds += 1;
            for i in 0..q {
                for j in 0..q {
                    if i == j || p[i] < step {
                        continue;
                    }
                    let mut cand = p.clone();
                    cand[i] -= &step;
                    cand[j] += &step;
                    let v = exact_value(sat, &cand);
                    if v > best {
                        best = v;
                        p = cand;
                        improved = true;
                    }
                }
            }
        }
        step = &step / &two;
    }
    (best, p)
}

/// Product-distribution lower bound on the trivial threshold, to within
/// `precision`.
pub fn rho_product_lower(fam: &PredicateFamily, precision: &Rational) -> Result<RhoLower> {
    if !precision.is_positive() {
        return Err(Error::InvalidArgument(format!("precision must be positive, got {precision}")));
    }
    let q = fam.q();
    let k = fam.k() as u32;
    let sat = satisfying_tuples(fam);
    let mut denom = INITIAL_GRID;
    loop {
        let points = binomial(denom as u128 + q as u128 - 1, q as u128 - 1);
        if points > MAX_GRID_POINTS {
            return Err(Error::BudgetExceeded {
                what: "product-distribution grid",
                needed: points,
                budget: MAX_GRID_POINTS,
            });
        }
        let scale = (denom as u128).checked_pow(k).ok_or_else(|| {
            Error::InvalidArgument("grid scale overflows; use a coarser precision".into())
        })?;
        let mut best: Option<(u128, Vec<u64>)> = None;
        let mut overflow = false;
        for_each_composition(denom, q, |counts| match scaled_value(&sat, counts) {
            Some(v) => {
                if best.as_ref().is_none_or(|(b, _)| v > *b) {
                    best = Some((v, counts.to_vec()));
                }
            }
            None => overflow = true,
        });
        if overflow {
            return Err(Error::InvalidArgument("grid evaluation overflows; use a coarser precision".into()));
        }
        let (grid_scaled, counts) = best.expect("grid is non-empty");
        let grid_max = Rational::from_bigints(grid_scaled.into(), scale.into());
        let start: Vec<Rational> = counts
            .iter()
            .map(|&c| Rational::new(c as i64, denom as i64))
            .collect();
        let (value, distribution) =
            local_ascent(&sat, start, Rational::new(1, 2 * denom as i64));
        // Every simplex point is within total variation q/(2N) of the grid, and
        // each f's product expectation is k-Lipschitz in total variation.
        let slack = Rational::new((k as usize * q) as i64, 2 * denom as i64);
        let upper = (&grid_max + &slack).min(Rational::one());
        if &upper - &value <= *precision {
            return Ok(RhoLower {
                value,
                distribution,
                upper,
                grid_denominator: denom,
            });
        }
        denom *= 2;
    }
}

/// Smallest `opt^CSP` over a deterministic stream of instances on at most
/// `n_max` variables; an upper bound on the trivial threshold.
pub fn rho_upper_empirical(fam: &Arc<PredicateFamily>, n_max: usize, budget: u64) -> Result<RhoUpper> {
    let k = fam.k();
    if n_max < k {
        return Err(Error::InvalidArgument(format!("n_max = {n_max} is below the arity {k}")));
    }
    if budget == 0 {
        return Err(Error::BudgetExhausted {
            what: "no instance evaluated",
            budget,
            evaluated: 0,
        });
    }
    let mut candidates: Vec<Instance> = Vec::new();
    for n in k..=n_max {
        for f in 0..fam.len() {
            let single = Arc::new(fam.subfamily(&[f])?);
            let inst = builders::complete(single, n);
            let cs = inst
                .constraints()
                .iter()
                .map(|c| crate::csp::instance::Constraint::new(f, c.vars.clone(), c.weight))
                .collect();
            candidates.push(Instance::new(fam.clone(), n, cs)?);
        }
        if fam.len() > 1 {
            candidates.push(builders::complete(fam.clone(), n));
        }
    }
    let types_at_max = builders::distinct_tuples(n_max, k).len() * fam.len();
    let cfg = SearchConfig {
        n_min: k,
        n_max,
        max_constraints: 2 * types_at_max,
        mode: SearchMode::Random,
        seed: 0,
        budget,
        ..SearchConfig::new(fam.clone())
    };
    let stream = candidates.into_iter().chain(enumerate_instances(&cfg)?);

    let mut best: Option<(Rational, Instance)> = None;
    let mut evaluated = 0u64;
    for inst in stream.take(budget as usize) {
        let (v, _) = brute_force_opt(&inst, DEFAULT_BRUTE_FORCE_BUDGET)?;
        evaluated += 1;
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, inst));
        }
    }
    let (value, witness) = best.ok_or(Error::BudgetExhausted {
        what: "no instance evaluated",
        budget,
        evaluated,
    })?;
    Ok(RhoUpper {
        value,
        witness,
        evaluated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::family::{families, Predicate};

    fn p(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn cut_lower_is_half() {
        let r = rho_product_lower(&families::cut(), &p(1, 1024)).unwrap();
        assert_eq!(r.value, p(1, 2));
        assert!(&r.upper - &r.value <= p(1, 1024));
    }

    #[test]
    fn dicut_lower_is_quarter() {
        let r = rho_product_lower(&families::dicut(), &p(1, 1024)).unwrap();
        assert_eq!(r.value, p(1, 4));
        assert_eq!(r.distribution, vec![p(1, 2), p(1, 2)]);
    }

    #[test]
    fn constant_lower_is_one() {
        let r = rho_product_lower(&families::constant_one(3, 2), &p(1, 16)).unwrap();
        assert_eq!(r.value, Rational::one());
    }

    #[test]
    fn ascent_reaches_off_grid_optimum() {
        // max_p min(p, (1-p)^2) is at p = (3 - sqrt 5)/2, irrational; the bracket
        // must still close to the requested precision.
        let fam = PredicateFamily::new(
            2,
            2,
            vec![
                Predicate::from_fn("first", 2, 2, |a| a[0] == 1),
                Predicate::from_fn("both0", 2, 2, |a| a[0] == 0 && a[1] == 0),
            ],
        )
        .unwrap();
        let r = rho_product_lower(&fam, &p(1, 256)).unwrap();
        let truth = (3.0 - 5f64.sqrt()) / 2.0;
        assert!(r.value.to_f64() <= truth + 1e-12);
        assert!(r.upper.to_f64() >= truth - 1e-12);
        assert!(&r.upper - &r.value <= p(1, 256));
    }

    #[test]
    fn rejects_nonpositive_precision() {
        assert!(rho_product_lower(&families::cut(), &Rational::zero()).is_err());
    }

    #[test]
    fn dicut_upper_from_complete_graphs() {
        let fam = Arc::new(families::dicut());
        let four = rho_upper_empirical(&fam, 4, 8).unwrap();
        assert!(four.value <= p(1, 3));
        let five = rho_upper_empirical(&fam, 5, 8).unwrap();
        assert!(five.value <= p(3, 10));
    }

    #[test]
    fn constant_upper_is_one() {
        let fam = Arc::new(families::constant_one(2, 2));
        assert_eq!(rho_upper_empirical(&fam, 4, 50).unwrap().value, Rational::one());
    }

    #[test]
    fn upper_errors() {
        let fam = Arc::new(families::cut());
        assert!(rho_upper_empirical(&fam, 1, 10).is_err());
        assert!(matches!(
            rho_upper_empirical(&fam, 3, 0),
            Err(Error::BudgetExhausted { .. })
        ));
    }
}
