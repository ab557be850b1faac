//! Deterministic instance streams.
//!
//! A constraint type is a predicate together with an ordered tuple of
//! distinct variables. Types are ordered by predicate index, then tuple.
//! Exhaustive mode lists, for each `n` and then each `m`, every multiset of
//! `m` types as a non-decreasing type sequence in lexicographic order.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::csp::builders::distinct_tuples;
use crate::csp::family::PredicateFamily;
use crate::csp::instance::{Constraint, Instance};
use crate::error::Result;
use crate::gap::config::{SearchConfig, SearchMode};

/// All constraint types on `n` variables, in stream order.
pub fn constraint_types(fam: &PredicateFamily, n: usize) -> Vec<(usize, Vec<usize>)> {
    let tuples = distinct_tuples(n, fam.k());
    (0..fam.len())
        .flat_map(|f| tuples.iter().map(move |t| (f, t.clone())))
        .collect()
}

fn build(fam: &Arc<PredicateFamily>, n: usize, types: &[(usize, Vec<usize>)], picks: &[usize]) -> Instance {
    let cs = picks
        .iter()
        .map(|&t| Constraint::unit(types[t].0, types[t].1.clone()))
        .collect();
    Instance::new(fam.clone(), n, cs).expect("enumerated constraints are valid")
}

pub struct ExhaustiveStream {
    family: Arc<PredicateFamily>,
    n: usize,
    n_max: usize,
    max_constraints: usize,
    types: Vec<(usize, Vec<usize>)>,
    picks: Vec<usize>,
    started: bool,
}

impl ExhaustiveStream {
    fn new(cfg: &SearchConfig) -> Self {
        ExhaustiveStream {
            family: cfg.family.clone(),
            n: cfg.n_min,
            n_max: cfg.n_max,
            max_constraints: cfg.max_constraints,
            types: constraint_types(&cfg.family, cfg.n_min),
            picks: vec![0],
            started: false,
        }
    }

    fn advance(&mut self) -> bool {
        let last = self.types.len() - 1;
        if let Some(i) = (0..self.picks.len()).rev().find(|&i| self.picks[i] < last) {
            let v = self.picks[i] + 1;
            for p in &mut self.picks[i..] {
                *p = v;
            }
            return true;
        }
        if self.picks.len() < self.max_constraints {
            self.picks = vec![0; self.picks.len() + 1];
            return true;
        }
        if self.n < self.n_max {
            self.n += 1;
            self.types = constraint_types(&self.family, self.n);
            self.picks = vec![0];
            return true;
        }
        false
    }
}

impl Iterator for ExhaustiveStream {
    type Item = Instance;

    fn next(&mut self) -> Option<Instance> {
        if self.started {
            if !self.advance() {
                return None;
            }
        } else {
            self.started = true;
        }
        Some(build(&self.family, self.n, &self.types, &self.picks))
    }
}

pub struct RandomStream {
    family: Arc<PredicateFamily>,
    n_min: usize,
    max_constraints: usize,
    types_by_n: Vec<Vec<(usize, Vec<usize>)>>,
    rng: ChaCha8Rng,
    remaining: u64,
}

impl Iterator for RandomStream {
    type Item = Instance;

    fn next(&mut self) -> Option<Instance> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let slot = self.rng.gen_range(0..self.types_by_n.len());
        let n = self.n_min + slot;
        let types = &self.types_by_n[slot];
        let m = self.rng.gen_range(1..=self.max_constraints);
        let picks: Vec<usize> = (0..m).map(|_| self.rng.gen_range(0..types.len())).collect();
        Some(build(&self.family, n, types, &picks))
    }
}

pub enum InstanceStream {
    Exhaustive(ExhaustiveStream),
    Random(RandomStream),
}

impl Iterator for InstanceStream {
    type Item = Instance;

    fn next(&mut self) -> Option<Instance> {
        match self {
            InstanceStream::Exhaustive(s) => s.next(),
            InstanceStream::Random(s) => s.next(),
        }
    }
}

/// The instance stream described by `cfg`. Exhaustive streams are finite and
/// ignore the budget; random streams yield exactly `cfg.budget` instances.
pub fn enumerate_instances(cfg: &SearchConfig) -> Result<InstanceStream> {
    cfg.validate_stream()?;
    Ok(match cfg.mode {
        SearchMode::Exhaustive => InstanceStream::Exhaustive(ExhaustiveStream::new(cfg)),
        SearchMode::Random => InstanceStream::Random(RandomStream {
            family: cfg.family.clone(),
            n_min: cfg.n_min,
            max_constraints: cfg.max_constraints,
            types_by_n: (cfg.n_min..=cfg.n_max)
                .map(|n| constraint_types(&cfg.family, n))
                .collect(),
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            remaining: cfg.budget,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::builders::triangle;
    use crate::csp::family::families;

    fn binomial(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    fn cfg(n_min: usize, n_max: usize, m: usize) -> SearchConfig {
        SearchConfig {
            n_min,
            n_max,
            max_constraints: m,
            ..SearchConfig::new(Arc::new(families::cut()))
        }
    }

    #[test]
    fn single_constraint_instances() {
        let all: Vec<Instance> = enumerate_instances(&cfg(2, 2, 1)).unwrap().collect();
        let tuples: Vec<Vec<usize>> = all.iter().map(|i| i.constraints()[0].vars.clone()).collect();
        assert_eq!(tuples, vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn multiset_counts() {
        // 6 types on 3 variables: C(6 + m - 1, m) multisets of size m.
        let total = enumerate_instances(&cfg(3, 3, 3)).unwrap().count() as u64;
        assert_eq!(total, (1..=3).map(|m| binomial(6 + m - 1, m)).sum::<u64>());
    }

    #[test]
    fn contains_triangle_and_is_sorted() {
        let tri = triangle();
        let mut found = false;
        for inst in enumerate_instances(&cfg(3, 3, 3)).unwrap() {
            let keys: Vec<_> = inst.constraints().iter().map(|c| (c.predicate, c.vars.clone())).collect();
            assert!(keys.windows(2).all(|w| w[0] <= w[1]));
            assert!(inst.constraints().iter().all(|c| c.weight == 1));
            found |= inst.constraints() == tri.constraints();
        }
        assert!(found);
    }

    #[test]
    fn n_ranges_in_order() {
        let ns: Vec<usize> = enumerate_instances(&cfg(2, 3, 2)).unwrap().map(|i| i.n()).collect();
        assert!(ns.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(ns[0], 2);
        assert_eq!(*ns.last().unwrap(), 3);
    }

    #[test]
    fn random_is_deterministic() {
        let mut c = cfg(2, 5, 6);
        c.mode = SearchMode::Random;
        c.seed = 17;
        c.budget = 50;
        let a: Vec<String> = enumerate_instances(&c).unwrap().map(|i| i.to_string()).collect();
        let b: Vec<String> = enumerate_instances(&c).unwrap().map(|i| i.to_string()).collect();
        assert_eq!(a.len(), 50);
        assert_eq!(a, b);
        c.seed = 18;
        let d: Vec<String> = enumerate_instances(&c).unwrap().map(|i| i.to_string()).collect();
        assert_ne!(a, d);
    }
}
