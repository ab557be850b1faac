use std::collections::BTreeMap;
use std::sync::Arc;

use proptest::prelude::*;

use cspgap::basic_lp::{build_basic_lp, lp_from_onewise, lp_from_width, solve_basic_lp, LocalDistributionSolution};
use cspgap::csp::brute::brute_force_opt;
use cspgap::csp::family::{Predicate, PredicateFamily};
use cspgap::csp::instance::{csp_value, Assignment, Constraint, Instance};
use cspgap::csp::width;
use cspgap::dichotomy::{
    check_no_bound, construct_yes_no, marginal_vector, onewise_witnesses, yes_value, DEFAULT_NO_SEARCH_BUDGET,
};
use cspgap::lp::{solve, vertex_enum_oracle, LpProblem, LpSolution, OracleResult};
use cspgap::Rational;

const BRUTE: u64 = 1 << 16;

fn family(q: usize, k: usize, tables: Vec<Vec<bool>>) -> Arc<PredicateFamily> {
    let preds = tables
        .into_iter()
        .enumerate()
        .map(|(i, t)| Predicate::new(format!("p{i}"), t))
        .collect();
    Arc::new(PredicateFamily::new(q, k, preds).unwrap())
}

/// A random family with `q` in 2..=3, `k` in 1..=3 and up to 3 predicates,
/// together with a random instance on at most 5 variables.
fn instance() -> impl Strategy<Value = Instance> {
    (2usize..=3, 1usize..=3, 1usize..=3)
        .prop_flat_map(|(q, k, f)| {
            let t = q.pow(k as u32);
            (
                Just((q, k)),
                prop::collection::vec(prop::collection::vec(any::<bool>(), t), f),
                k.max(2)..=5usize,
            )
        })
        .prop_flat_map(|((q, k), tables, n)| {
            let f = tables.len();
            let vars = Just((0..n).collect::<Vec<usize>>()).prop_shuffle().prop_map(move |mut v| {
                v.truncate(k);
                v
            });
            let constraint = (0..f, vars, 1u64..=3).prop_map(|(p, vars, w)| Constraint::new(p, vars, w));
            (Just((q, k, tables, n)), prop::collection::vec(constraint, 1..=6))
        })
        .prop_map(|((q, k, tables, n), cs)| Instance::new(family(q, k, tables), n, cs).unwrap())
}

fn assignment_for(inst: &Instance, seed: u64) -> Assignment {
    let q = inst.family().q() as u64;
    let mut s = seed;
    Assignment(
        (0..inst.n())
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((s >> 33) % q) as u8
            })
            .collect(),
    )
}

fn random_lp() -> impl Strategy<Value = LpProblem> {
    (1usize..=7, 0usize..=4).prop_flat_map(|(n, m)| {
        (
            prop::collection::vec(-3i64..=3, n),
            prop::collection::vec((prop::collection::vec(-3i64..=3, n), -3i64..=5), m),
        )
            .prop_map(|(c, rows)| {
                let mut p = LpProblem::unlabelled(c.into_iter().map(Rational::from_integer).collect());
                for (row, b) in rows {
                    p.add_row(row.into_iter().map(Rational::from_integer).collect(), Rational::from_integer(b))
                        .unwrap();
                }
                p
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn relaxation_dominance(inst in instance()) {
        let (opt, _) = brute_force_opt(&inst, BRUTE).unwrap();
        let lp = solve_basic_lp(&inst).unwrap();
        prop_assert!(lp.value >= opt, "{inst}: {} < {opt}", lp.value);
    }

    #[test]
    fn integral_embedding(inst in instance(), seed in any::<u64>()) {
        let a = assignment_for(&inst, seed);
        let sol = LocalDistributionSolution::from_assignment(&inst, &a).unwrap();
        sol.verify(&inst).unwrap();
        prop_assert_eq!(&sol.value, &csp_value(&inst, &a).unwrap());
        let lp = build_basic_lp(&inst);
        let x = lp.encode(&sol);
        prop_assert!(lp.problem().is_feasible_point(&x));
        prop_assert_eq!(lp.problem().objective_value(&x), sol.value.clone());
    }

    #[test]
    fn decode_round_trip(inst in instance()) {
        let lp = build_basic_lp(&inst);
        let sol = solve_basic_lp(&inst).unwrap();
        let x = lp.encode(&sol);
        let back = lp.decode(&inst, &x).unwrap();
        back.verify(&inst).unwrap();
        prop_assert_eq!(back, sol);
    }

    #[test]
    fn width_bound(inst in instance()) {
        let omega = width(inst.family()).value;
        let from_width = lp_from_width(&inst).unwrap();
        let solved = solve_basic_lp(&inst).unwrap();
        prop_assert!(solved.value >= from_width.value);
        prop_assert!(from_width.value >= omega);
    }

    #[test]
    fn strong_support_gives_value_one(inst in instance()) {
        let witnesses = onewise_witnesses(inst.family()).unwrap();
        let used_supported = inst
            .constraints()
            .iter()
            .all(|c| witnesses.contains_key(inst.family().predicate(c.predicate).name()));
        if used_supported {
            prop_assert!(solve_basic_lp(&inst).unwrap().value.is_one());
            prop_assert!(lp_from_onewise(&inst, &witnesses).unwrap().value.is_one());
        } else {
            prop_assert!(lp_from_onewise(&inst, &BTreeMap::new()).is_err());
        }
    }

    #[test]
    fn yes_no_pair_invariants(inst in instance(), seed in 0u64..4) {
        let sol = solve_basic_lp(&inst).unwrap();
        let pair = construct_yes_no(&inst, &sol).unwrap();
        prop_assert_eq!(marginal_vector(&pair.d_yes), marginal_vector(&pair.d_no));
        prop_assert_eq!(yes_value(&pair.d_yes), sol.value.clone());
        let (opt, _) = brute_force_opt(&inst, BRUTE).unwrap();
        let bound = check_no_bound(&inst, &sol, &pair.d_no, &opt, DEFAULT_NO_SEARCH_BUDGET / 4, seed).unwrap();
        prop_assert!(bound.search.bound <= opt);
    }

    #[test]
    fn renaming_preserves_values(inst in instance(), shift in 0usize..5) {
        let n = inst.n();
        let perm: Vec<usize> = (0..n).map(|i| (i + shift) % n).rev().collect();
        let renamed = inst.relabel(&perm).unwrap();
        prop_assert_eq!(
            brute_force_opt(&inst, BRUTE).unwrap().0,
            brute_force_opt(&renamed, BRUTE).unwrap().0
        );
        prop_assert_eq!(solve_basic_lp(&inst).unwrap().value, solve_basic_lp(&renamed).unwrap().value);
    }

    #[test]
    fn simplex_matches_vertex_enumeration(p in random_lp()) {
        let ours = solve(&p).unwrap();
        let oracle = vertex_enum_oracle(&p, 1 << 16).unwrap();
        match (ours, oracle) {
            (LpSolution::Optimal(o), OracleResult::Optimal(v)) => prop_assert_eq!(o.value, v),
            (LpSolution::Infeasible(c), OracleResult::Infeasible) => prop_assert!(c.verify(&p)),
            (LpSolution::Unbounded(c), OracleResult::Unbounded) => prop_assert!(c.verify(&p)),
            (a, b) => prop_assert!(false, "simplex {:?} vs oracle {:?}", a.status(), b),
        }
    }
}
