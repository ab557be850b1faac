//! Brute-force LP oracle: enumerate every basis, keep the feasible ones.
//!
//! Shares nothing with the simplex code beyond the problem type. Feasible
//! standard-form polyhedra are pointed, so the optimum (when finite) sits at a
//! basic feasible solution. Unboundedness is decided on the recession cone
//! `{d >= 0, A d = 0}` through the vertices of its slice `sum(d) = 1`.

use crate::error::{Error, Result};
use crate::lp::problem::LpProblem;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleResult {
    Optimal(Rational),
    Infeasible,
    Unbounded,
}

/// Row-reduces `[A | b]`. Returns the independent rows, or `None` when some
/// row reduces to `0 = nonzero`.
fn independent_rows(rows: &[Vec<Rational>], rhs: &[Rational]) -> Option<(Vec<Vec<Rational>>, Vec<Rational>)> {
    let mut a: Vec<Vec<Rational>> = rows.to_vec();
    let mut b: Vec<Rational> = rhs.to_vec();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..a.len()).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(rank, piv);
        b.swap(rank, piv);
        let inv = a[rank][col].recip();
        for v in a[rank].iter_mut() {
            *v = &*v * &inv;
        }
        b[rank] = &b[rank] * &inv;
        for i in 0..a.len() {
            if i != rank && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in 0..cols {
                    let d = &f * &a[rank][j];
                    a[i][j] -= d;
                }
                let d = &f * &b[rank];
                b[i] -= d;
            }
        }
        rank += 1;
    }
    if b[rank..].iter().any(|v| !v.is_zero()) {
        return None;
    }
    a.truncate(rank);
    b.truncate(rank);
    Some((a, b))
}

/// Solves the square system restricted to `cols`; `None` if singular.
fn solve_basis(rows: &[Vec<Rational>], rhs: &[Rational], cols: &[usize]) -> Option<Vec<Rational>> {
    let sub: Vec<Vec<Rational>> = rows
        .iter()
        .map(|row| cols.iter().map(|&c| row[c].clone()).collect())
        .collect();
    let size = cols.len();
    let (reduced, b) = independent_rows(&sub, rhs)?;
    if reduced.len() < size {
        return None;
    }
    // Full rank: the reduced system is the identity.
    Some(b)
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i as u128 + 1))
}

/// Visits every basic feasible solution of `{rows x = rhs, x >= 0}`, where the
/// rows are independent.
fn for_each_bfs(
    rows: &[Vec<Rational>],
    rhs: &[Rational],
    n: usize,
    mut visit: impl FnMut(&[Rational]),
) {
    let r = rows.len();
    if r == 0 {
        visit(&vec![Rational::zero(); n]);
        return;
    }
    let mut cols: Vec<usize> = (0..r).collect();
    loop {
        if let Some(xb) = solve_basis(rows, rhs, &cols) {
            if xb.iter().all(|v| !v.is_negative()) {
                let mut x = vec![Rational::zero(); n];
                for (&c, v) in cols.iter().zip(xb) {
                    x[c] = v;
                }
                visit(&x);
            }
        }
        // Next r-subset in lexicographic order.
        let Some(i) = (0..r).rev().find(|&i| cols[i] < n - r + i) else {
            return;
        };
        cols[i] += 1;
        for j in i + 1..r {
            cols[j] = cols[j - 1] + 1;
        }
    }
}

/// Optimum of `p` by exhaustive basis enumeration. `budget` caps the number of
/// candidate bases examined.
pub fn vertex_enum_oracle(p: &LpProblem, budget: u64) -> Result<OracleResult> {
    let n = p.num_vars();
    let Some((rows, rhs)) = independent_rows(p.rows(), p.rhs()) else {
        return Ok(OracleResult::Infeasible);
    };
    let r = rows.len();
    if r > n {
        return Ok(OracleResult::Infeasible);
    }
    let needed = binomial(n, r) + binomial(n, (r + 1).min(n));
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded {
            what: "vertex enumeration",
            needed,
            budget: budget as u128,
        });
    }

    let c = p.objective();
    let value_of = |x: &[Rational]| -> Rational {
        x.iter().zip(c).map(|(a, b)| a * b).sum()
    };
    let mut best: Option<Rational> = None;
    for_each_bfs(&rows, &rhs, n, |x| {
        let v = value_of(x);
        if best.as_ref().is_none_or(|b| v > *b) {
            best = Some(v);
        }
    });
    let Some(best) = best else {
        return Ok(OracleResult::Infeasible);
    };

    // Extreme rays of the recession cone.
    let mut cone_rows = p.rows().to_vec();
    cone_rows.push(vec![Rational::one(); n]);
    let mut cone_rhs = vec![Rational::zero(); p.num_rows()];
    cone_rhs.push(Rational::one());
    let mut improving_ray = false;
    if let Some((crow, crhs)) = independent_rows(&cone_rows, &cone_rhs) {
        if crow.len() <= n {
            for_each_bfs(&crow, &crhs, n, |d| {
                if value_of(d).is_positive() {
                    improving_ray = true;
                }
            });
        }
    }
    if improving_ray {
        return Ok(OracleResult::Unbounded);
    }
    Ok(OracleResult::Optimal(best))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn empty_region_is_infeasible() {
        let mut p = LpProblem::unlabelled(vec![r(1)]);
        p.add_row(vec![r(1)], r(-1)).unwrap();
        assert_eq!(vertex_enum_oracle(&p, 100).unwrap(), OracleResult::Infeasible);
        let mut q = LpProblem::unlabelled(vec![r(1), r(1)]);
        q.add_row(vec![r(1), r(1)], r(1)).unwrap();
        q.add_row(vec![r(1), r(1)], r(2)).unwrap();
        assert_eq!(vertex_enum_oracle(&q, 100).unwrap(), OracleResult::Infeasible);
    }

    #[test]
    fn unconstrained_positive_objective_is_unbounded() {
        let p = LpProblem::unlabelled(vec![r(1)]);
        assert_eq!(vertex_enum_oracle(&p, 100).unwrap(), OracleResult::Unbounded);
        let q = LpProblem::unlabelled(vec![r(-1)]);
        assert_eq!(vertex_enum_oracle(&q, 100).unwrap(), OracleResult::Optimal(r(0)));
    }

    #[test]
    fn small_optimum() {
        // max x + 2y, x + y + s = 4, x + 3y + t = 6
        let mut p = LpProblem::unlabelled(vec![r(1), r(2), r(0), r(0)]);
        p.add_row(vec![r(1), r(1), r(1), r(0)], r(4)).unwrap();
        p.add_row(vec![r(1), r(3), r(0), r(1)], r(6)).unwrap();
        assert_eq!(vertex_enum_oracle(&p, 100).unwrap(), OracleResult::Optimal(r(5)));
    }

    #[test]
    fn budget_error() {
        let mut p = LpProblem::unlabelled(vec![r(0); 20]);
        p.add_row(vec![r(1); 20], r(1)).unwrap();
        p.add_row((0..20).map(r).collect(), r(3)).unwrap();
        assert!(matches!(vertex_enum_oracle(&p, 10), Err(Error::BudgetExceeded { .. })));
    }
}
