//! Named instance constructors.

use std::sync::Arc;

use crate::csp::family::{families, PredicateFamily};
use crate::csp::instance::{Constraint, Instance};

/// Max-Cut on the `n`-cycle `1-2-...-n-1`.
pub fn cycle(n: usize) -> Instance {
    let cs = (0..n).map(|i| Constraint::unit(0, vec![i, (i + 1) % n])).collect();
    Instance::new(Arc::new(families::cut()), n, cs).expect("valid cycle")
}

pub fn triangle() -> Instance {
    cycle(3)
}

pub fn single_edge() -> Instance {
    Instance::new(Arc::new(families::cut()), 2, vec![Constraint::unit(0, vec![0, 1])])
        .expect("valid edge")
}

/// Every predicate of `family` applied once to every ordered tuple of distinct
/// variables out of `n`. For `{f_DiCut}` this is the complete bidirected graph.
pub fn complete(family: Arc<PredicateFamily>, n: usize) -> Instance {
    let cs = distinct_tuples(n, family.k())
        .into_iter()
        .flat_map(|t| (0..family.len()).map(move |f| Constraint::unit(f, t.clone())))
        .collect();
    Instance::new(family, n, cs).expect("n >= k")
}

/// All ordered `k`-tuples of distinct elements of `0..n`, lexicographically.
pub fn distinct_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in 0..n {
            if !cur.contains(&v) {
                cur.push(v);
                rec(n, k, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tuple_counts() {
        assert_eq!(distinct_tuples(5, 2).len(), 20);
        assert_eq!(distinct_tuples(4, 3).len(), 24);
        assert_eq!(distinct_tuples(2, 3).len(), 0);
        assert_eq!(distinct_tuples(3, 2)[0], vec![0, 1]);
    }

    #[test]
    fn complete_bidirected_sizes() {
        let inst = complete(Arc::new(families::dicut()), 5);
        assert_eq!(inst.m(), 20);
    }
}
