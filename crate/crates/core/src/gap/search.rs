use crate::basic_lp::{solve_basic_lp, GapReport};
use crate::csp::brute::brute_force_opt_with;
use crate::csp::instance::Instance;
use crate::error::{Error, Result};
use crate::gap::certificate::{build_certificate, GapCertificate};
use crate::gap::config::SearchConfig;
use crate::gap::enumerate::enumerate_instances;
use crate::parallel;
use crate::rational::Rational;

/// Instances handed to the worker pool per batch, per worker.
const BATCH_PER_WORKER: usize = 64;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub evaluated: u64,
    /// Instances meeting the `(gamma, beta)` condition.
    pub gaps_seen: u64,
    /// True when the stream was cut off by the budget.
    pub budget_hit: bool,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub certificate: Option<GapCertificate>,
    pub stats: SearchStats,
}

/// `Some(report)` when `inst` is a `(gamma, beta)` gap. The LP is skipped
/// when soundness already fails.
pub fn evaluate_instance(inst: &Instance, gamma: &Rational, beta: &Rational, brute_budget: u64) -> Result<Option<GapReport>> {
    let (csp, witness) = brute_force_opt_with(inst, brute_budget, 1)?;
    if csp > *beta {
        return Ok(None);
    }
    let sol = solve_basic_lp(inst)?;
    if sol.value < *gamma {
        return Ok(None);
    }
    Ok(Some(GapReport {
        lp_value: sol.value.clone(),
        csp_value: csp,
        csp_witness: witness,
        lp_witness: sol,
    }))
}

pub fn search_gap(cfg: &SearchConfig) -> Result<SearchOutcome> {
    search_gap_with_progress(cfg, |_| {})
}

/// Walks the instance stream in order. The first hit wins, or with
/// `maximize_gap` the largest `opt^LP - opt^CSP` (earliest on ties). The
/// worker pool never changes the answer.
pub fn search_gap_with_progress(cfg: &SearchConfig, mut progress: impl FnMut(&SearchStats)) -> Result<SearchOutcome> {
    cfg.validate()?;
    let workers = parallel::worker_count();
    let batch = workers * BATCH_PER_WORKER;
    let mut stream = enumerate_instances(cfg)?;
    let mut stats = SearchStats::default();
    let mut best: Option<(Rational, Instance, GapReport)> = None;

    'outer: loop {
        let room = (cfg.budget - stats.evaluated) as usize;
        let chunk: Vec<Instance> = stream.by_ref().take(batch.min(room)).collect();
        if chunk.is_empty() {
            break;
        }
        let results = parallel::par_map(&chunk, workers, |inst| {
            evaluate_instance(inst, &cfg.gamma, &cfg.beta, cfg.brute_force_budget)
        });
        for (inst, res) in chunk.into_iter().zip(results) {
            stats.evaluated += 1;
            let Some(report) = res? else { continue };
            stats.gaps_seen += 1;
            let gap = &report.lp_value - &report.csp_value;
            if best.as_ref().is_none_or(|(g, _, _)| gap > *g) {
                best = Some((gap, inst, report));
            }
            if !cfg.maximize_gap {
                break 'outer;
            }
        }
        progress(&stats);
        if stats.evaluated >= cfg.budget {
            stats.budget_hit = stream.next().is_some();
            break;
        }
    }
    progress(&stats);

    let certificate = match best {
        Some((_, inst, report)) => Some(build_certificate(
            &inst,
            &report,
            &cfg.gamma,
            &cfg.beta,
            cfg.seed,
            cfg.no_search_budget,
        )?),
        None => None,
    };
    if certificate.is_none() && stats.budget_hit {
        return Err(Error::BudgetExhausted {
            what: "gap search",
            budget: cfg.budget,
            evaluated: stats.evaluated,
        });
    }
    Ok(SearchOutcome { certificate, stats })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::csp::family::{families, PredicateFamily};
    use crate::gap::certificate::{verify_certificate, VerifyOptions};
    use crate::gap::config::SearchMode;

    fn cut_cfg(beta: Rational, n_max: usize) -> SearchConfig {
        SearchConfig {
            n_max,
            max_constraints: 5,
            beta,
            ..SearchConfig::new(Arc::new(families::cut()))
        }
    }

    #[test]
    fn finds_odd_cycle() {
        let out = search_gap(&cut_cfg(Rational::new(4, 5), 5)).unwrap();
        let cert = out.certificate.unwrap();
        assert_eq!(cert.lp_value, Rational::one());
        assert!(cert.csp_value <= Rational::new(4, 5));
        assert!(verify_certificate(&cert, &VerifyOptions::default()).passed());
    }

    #[test]
    fn no_zero_soundness_gap() {
        let out = search_gap(&cut_cfg(Rational::zero(), 4)).unwrap();
        assert!(out.certificate.is_none());
        assert!(!out.stats.budget_hit);
        assert_eq!(out.stats.gaps_seen, 0);
    }

    #[test]
    fn single_constraint_is_satisfiable() {
        let fam = Arc::new(PredicateFamily::new(2, 2, vec![families::dicut().predicate(0).clone()]).unwrap());
        let cfg = SearchConfig {
            n_max: 3,
            max_constraints: 1,
            beta: Rational::new(1, 2),
            ..SearchConfig::new(fam)
        };
        assert!(search_gap(&cfg).unwrap().certificate.is_none());
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let mut cfg = cut_cfg(Rational::zero(), 5);
        cfg.budget = 10;
        match search_gap(&cfg) {
            Err(Error::BudgetExhausted { evaluated, .. }) => assert_eq!(evaluated, 10),
            other => panic!("expected budget exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn deterministic_and_maximizing() {
        let mut cfg = cut_cfg(Rational::new(4, 5), 4);
        cfg.maximize_gap = true;
        let a = search_gap(&cfg).unwrap().certificate.unwrap();
        let b = search_gap(&cfg).unwrap().certificate.unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(&a.lp_value - &a.csp_value, Rational::new(1, 3));
    }

    #[test]
    fn random_mode_finds_gap() {
        let mut cfg = cut_cfg(Rational::new(4, 5), 5);
        cfg.mode = SearchMode::Random;
        cfg.max_constraints = 8;
        cfg.budget = 5000;
        cfg.seed = 3;
        let out = search_gap(&cfg).unwrap();
        assert!(out.certificate.is_some());
    }
}
