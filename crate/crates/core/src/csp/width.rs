//! Widths of predicates over `Z_q`.
//!
//! `w_b(f)` is the fraction of constant shifts `b + (a, ..., a)` that satisfy
//! `f`; `w(f)` maximises over `b` and the family width minimises over `f`.

use crate::csp::family::{Predicate, PredicateFamily, TupleSpace};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateWidth {
    pub name: String,
    pub width: Rational,
    /// Lexicographically smallest maximising base point.
    pub base: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WidthReport {
    pub value: Rational,
    pub per_predicate: Vec<PredicateWidth>,
}

/// `b + (a, ..., a)` over `Z_q`.
pub fn shift(base: &[u8], a: u8, q: usize) -> Vec<u8> {
    base.iter()
        .map(|&b| ((b as usize + a as usize) % q) as u8)
        .collect()
}

/// Number of `a in Z_q` with `f(b + a^k) = 1`.
pub fn shift_hits(pred: &Predicate, space: TupleSpace, base: &[u8]) -> usize {
    (0..space.q as u8)
        .filter(|&a| pred.eval(space.encode(&shift(base, a, space.q))))
        .count()
}

pub fn width_at(pred: &Predicate, space: TupleSpace, base: &[u8]) -> Rational {
    Rational::new(shift_hits(pred, space, base) as i64, space.q as i64)
}

pub fn predicate_width(pred: &Predicate, space: TupleSpace) -> PredicateWidth {
    let mut best = (0usize, 0usize);
    for code in 0..space.len() {
        let hits = shift_hits(pred, space, &space.decode(code));
        if hits > best.0 {
            best = (hits, code);
            if hits == space.q {
                break;
            }
        }
    }
    PredicateWidth {
        name: pred.name().to_string(),
        width: Rational::new(best.0 as i64, space.q as i64),
        base: space.decode(best.1),
    }
}

pub fn width(fam: &PredicateFamily) -> WidthReport {
    let space = fam.space();
    let per_predicate: Vec<_> = fam
        .predicates()
        .iter()
        .map(|p| predicate_width(p, space))
        .collect();
    let value = per_predicate
        .iter()
        .map(|w| w.width.clone())
        .min()
        .expect("family is non-empty");
    WidthReport {
        value,
        per_predicate,
    }
}
