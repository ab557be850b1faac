//! Exhaustive search over all `q^n` assignments.

use crate::csp::instance::{Assignment, Instance};
use crate::error::{Error, Result};
use crate::parallel;
use crate::rational::Rational;

/// Default cap on the number of assignments enumerated.
pub const DEFAULT_BRUTE_FORCE_BUDGET: u64 = 1 << 24;

/// Below this many assignments enumeration stays on the calling thread.
const PARALLEL_THRESHOLD: u64 = 1 << 16;

/// Best satisfied weight over codes `[start, end)`, earliest code on ties.
fn scan(inst: &Instance, start: u64, end: u64) -> (u64, u64) {
    let q = inst.family().q() as u8;
    let n = inst.n();
    let mut values = vec![0u8; n];
    let mut rest = start;
    for slot in values.iter_mut().rev() {
        *slot = (rest % q as u64) as u8;
        rest /= q as u64;
    }
    let mut best = (0u64, start);
    let mut found = false;
    for code in start..end {
        let w = inst.satisfied_weight(&values);
        if !found || w > best.0 {
            best = (w, code);
            found = true;
            if w == inst.total_weight() {
                break;
            }
        }
        for slot in values.iter_mut().rev() {
            *slot += 1;
            if *slot < q {
                break;
            }
            *slot = 0;
        }
    }
    best
}

fn decode(code: u64, q: usize, n: usize) -> Assignment {
    let mut values = vec![0u8; n];
    let mut rest = code;
    for slot in values.iter_mut().rev() {
        *slot = (rest % q as u64) as u8;
        rest /= q as u64;
    }
    Assignment(values)
}

/// `opt^CSP` with the lexicographically smallest optimal assignment.
pub fn brute_force_opt(inst: &Instance, budget: u64) -> Result<(Rational, Assignment)> {
    brute_force_opt_with(inst, budget, parallel::worker_count())
}

pub fn brute_force_opt_with(
    inst: &Instance,
    budget: u64,
    workers: usize,
) -> Result<(Rational, Assignment)> {
    let q = inst.family().q();
    let n = inst.n();
    let total = (q as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > budget as u128 {
        return Err(Error::BudgetExceeded {
            what: "brute-force enumeration",
            needed: total,
            budget: budget as u128,
        });
    }
    let total = total as u64;
    let (weight, code) = if total < PARALLEL_THRESHOLD || workers <= 1 {
        scan(inst, 0, total)
    } else {
        let parts = (workers as u64) * 4;
        let step = total.div_ceil(parts);
        let ranges: Vec<(u64, u64)> = (0..parts)
            .map(|i| (i * step, ((i + 1) * step).min(total)))
            .filter(|(s, e)| s < e)
            .collect();
        let results = parallel::par_map(&ranges, workers, |&(s, e)| scan(inst, s, e));
        results
            .into_iter()
            .fold(None, |acc: Option<(u64, u64)>, r| match acc {
                Some(b) if b.0 >= r.0 => Some(b),
                _ => Some(r),
            })
            .expect("non-empty range")
    };
    let value = Rational::from(weight) / Rational::from(inst.total_weight());
    Ok((value, decode(code, q, n)))
}
