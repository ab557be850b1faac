use std::fs;
use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde_json::{json, Value};

use cspgap::basic_lp::{gap_report, solve_basic_lp, LocalDistributionSolution};
use cspgap::csp::brute::brute_force_opt;
use cspgap::csp::instance::Instance;
use cspgap::csp::io::{load_family, load_instance, InstanceFile};
use cspgap::csp::{rho_product_lower, rho_upper_empirical, width, PredicateFamily};
use cspgap::dichotomy::{onewise_support, support_classification_with, ClassificationLimits, DEFAULT_NO_SEARCH_BUDGET};
use cspgap::gap::{
    build_certificate, search_gap_with_progress, validate_thresholds, verify_certificate_json, GapCertificate,
    SearchConfig, SearchMode, VerifyOptions,
};
use cspgap::{Error, Rational, Result};

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON values serialize"));
}

fn write_certificate(cert: &GapCertificate, out: &Path) -> Result<()> {
    fs::write(out, cert.to_json()).map_err(|source| Error::Io {
        path: out.display().to_string(),
        source,
    })
}

fn digits(values: &[u8]) -> String {
    values
        .iter()
        .map(|&v| char::from_digit(v as u32, 36).expect("alphabet fits base 36"))
        .collect()
}

fn ratios(v: &[Rational]) -> Vec<String> {
    v.iter().map(Rational::to_string).collect()
}

pub fn family_stats(path: &Path, json: bool, precision: &Rational, budget: u64, n_max: usize) -> Result<bool> {
    let fam: Arc<PredicateFamily> = Arc::new(load_family(path)?);
    let lower = rho_product_lower(&fam, precision)?;
    let upper = rho_upper_empirical(&fam, n_max.max(fam.k()), budget)?;
    let w = width(&fam);
    let limits = ClassificationLimits {
        rho_n_max: n_max,
        rho_budget: budget,
        ..ClassificationLimits::default()
    };
    let class = support_classification_with(&fam, precision, &limits)?;
    let space = fam.space();
    let mut witnesses = Vec::new();
    for p in fam.predicates() {
        let w = onewise_support(p, space)?;
        witnesses.push((p.name().to_string(), w.witness().map(|d| d.to_vec())));
    }

    if json {
        let per_width: Vec<Value> = w
            .per_predicate
            .iter()
            .map(|p| json!({"name": p.name, "width": p.width.to_string(), "base": digits(&p.base)}))
            .collect();
        let onewise: serde_json::Map<String, Value> = witnesses
            .iter()
            .map(|(name, d)| {
                let v = match d {
                    Some(d) => Value::Object(
                        d.iter()
                            .enumerate()
                            .filter(|(_, p)| !p.is_zero())
                            .map(|(a, p)| (space.digits(a), Value::String(p.to_string())))
                            .collect(),
                    ),
                    None => Value::Null,
                };
                (name.clone(), v)
            })
            .collect();
        print_json(&json!({
            "q": fam.q(),
            "k": fam.k(),
            "predicates": fam.len(),
            "rho": {
                "lower": lower.value.to_string(),
                "upper": upper.value.to_string(),
                "product_distribution": ratios(&lower.distribution),
                "product_maximin_upper": lower.upper.to_string(),
                "upper_witness": InstanceFile::from_instance(&upper.witness),
                "instances_evaluated": upper.evaluated,
            },
            "width": {"value": w.value.to_string(), "per_predicate": per_width},
            "onewise": {"class": class.to_string(), "witnesses": onewise},
        }));
        return Ok(true);
    }

    println!("q = {}, k = {}, |F| = {}", fam.q(), fam.k(), fam.len());
    println!("rho in [{}, {}]", lower.value, upper.value);
    println!(
        "  lower: product distribution ({}), maximin <= {}",
        ratios(&lower.distribution).join(", "),
        lower.upper
    );
    println!(
        "  upper: smallest optimum over {} instances with n <= {}, attained with n = {}, m = {}",
        upper.evaluated,
        n_max.max(fam.k()),
        upper.witness.n(),
        upper.witness.m()
    );
    println!("omega = {}", w.value);
    for p in &w.per_predicate {
        println!("  {}: width {} at base {}", p.name, p.width, digits(&p.base));
    }
    println!("one-wise support: {class}");
    for (name, d) in &witnesses {
        match d {
            Some(d) => {
                let atoms: Vec<String> = d
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| !p.is_zero())
                    .map(|(a, p)| format!("{} {p}", space.digits(a)))
                    .collect();
                println!("  {name}: witness {}", atoms.join(", "));
            }
            None => println!("  {name}: refused"),
        }
    }
    Ok(true)
}

fn dump_solution(inst: &Instance, sol: &LocalDistributionSolution) {
    let space = inst.family().space();
    for (ci, yc) in sol.local.iter().enumerate() {
        let atoms: Vec<String> = yc
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(a, p)| format!("{} {p}", space.digits(a)))
            .collect();
        println!("Y_{}: {}", ci + 1, atoms.join(", "));
    }
    for (i, xi) in sol.marginals.iter().enumerate() {
        println!("X_{}: {}", i + 1, ratios(xi).join(" "));
    }
}

pub fn lp_solve(path: &Path, json: bool, brute: bool, dump: bool, budget: u64) -> Result<bool> {
    let inst = load_instance(path)?;
    let sol = solve_basic_lp(&inst)?;
    let csp = if brute { Some(brute_force_opt(&inst, budget)?) } else { None };
    if json {
        let mut v = json!({"lp_value": sol.value.to_string()});
        if let Some((value, witness)) = &csp {
            v["csp_value"] = json!(value.to_string());
            v["csp_witness"] = json!(digits(witness.values()));
        }
        if dump {
            v["local"] = json!(sol.local.iter().map(|y| ratios(y)).collect::<Vec<_>>());
            v["marginals"] = json!(sol.marginals.iter().map(|x| ratios(x)).collect::<Vec<_>>());
        }
        print_json(&v);
        return Ok(true);
    }
    println!("opt^LP = {}", sol.value);
    if let Some((value, witness)) = &csp {
        println!("opt^CSP = {value} (witness {})", digits(witness.values()));
    }
    if dump {
        dump_solution(&inst, &sol);
    }
    Ok(true)
}

pub fn gap_check(
    path: &Path,
    gamma: &Rational,
    beta: &Rational,
    json: bool,
    seed: u64,
    budget: u64,
    out: Option<&Path>,
) -> Result<bool> {
    validate_thresholds(gamma, beta)?;
    let inst = load_instance(path)?;
    let report = gap_report(&inst, budget)?;
    let completeness = report.lp_value >= *gamma;
    let soundness = report.csp_value <= *beta;
    let mut digest = None;
    if completeness && soundness {
        let cert = build_certificate(&inst, &report, gamma, beta, seed, DEFAULT_NO_SEARCH_BUDGET)?;
        if let Some(out) = out {
            write_certificate(&cert, out)?;
        }
        digest = Some(cert.digest);
    }
    let failing: Vec<&str> = [(!completeness, "completeness"), (!soundness, "soundness")]
        .into_iter()
        .filter_map(|(bad, name)| bad.then_some(name))
        .collect();

    if json {
        print_json(&json!({
            "gap": failing.is_empty(),
            "gamma": gamma.to_string(),
            "beta": beta.to_string(),
            "lp_value": report.lp_value.to_string(),
            "csp_value": report.csp_value.to_string(),
            "failing": failing,
            "digest": digest,
        }));
    } else if failing.is_empty() {
        println!(
            "gap instance: opt^LP = {} >= {gamma}, opt^CSP = {} <= {beta}",
            report.lp_value, report.csp_value
        );
        if let Some(out) = out {
            println!("certificate written to {}", out.display());
        }
    } else {
        if !completeness {
            println!("completeness fails: opt^LP = {} < {gamma}", report.lp_value);
        }
        if !soundness {
            println!("soundness fails: opt^CSP = {} > {beta}", report.csp_value);
        }
    }
    Ok(failing.is_empty())
}

pub struct SearchArgs {
    pub gamma: Rational,
    pub beta: Rational,
    pub seed: u64,
    pub budget: u64,
    pub n_min: Option<usize>,
    pub n_max: usize,
    pub max_constraints: usize,
    pub random: bool,
    pub maximize_gap: bool,
}

pub fn gap_search(path: &Path, args: &SearchArgs, json: bool, out: Option<&Path>) -> Result<bool> {
    let fam = Arc::new(load_family(path)?);
    let cfg = SearchConfig {
        n_min: args.n_min.unwrap_or(fam.k()),
        n_max: args.n_max,
        max_constraints: args.max_constraints,
        mode: if args.random { SearchMode::Random } else { SearchMode::Exhaustive },
        seed: args.seed,
        budget: args.budget,
        gamma: args.gamma.clone(),
        beta: args.beta.clone(),
        maximize_gap: args.maximize_gap,
        ..SearchConfig::new(fam)
    };
    let start = Instant::now();
    let mut last = Instant::now();
    let result = search_gap_with_progress(&cfg, |s| {
        if last.elapsed() >= Duration::from_secs(1) {
            eprintln!("searched {} instances, {} gaps", s.evaluated, s.gaps_seen);
            last = Instant::now();
        }
    });
    let outcome = match result {
        Ok(o) => o,
        Err(Error::BudgetExhausted { evaluated, .. }) => {
            if json {
                print_json(&json!({"found": false, "evaluated": evaluated, "budget_hit": true}));
            } else {
                println!("no gap instance found: budget exhausted after {evaluated} instances");
            }
            return Ok(false);
        }
        Err(e) => return Err(e),
    };
    eprintln!(
        "searched {} instances in {:.1}s",
        outcome.stats.evaluated,
        start.elapsed().as_secs_f64()
    );
    let Some(cert) = outcome.certificate else {
        if json {
            print_json(&json!({
                "found": false,
                "evaluated": outcome.stats.evaluated,
                "budget_hit": outcome.stats.budget_hit,
            }));
        } else {
            println!("no gap instance found among {} instances", outcome.stats.evaluated);
        }
        return Ok(false);
    };
    if let Some(out) = out {
        write_certificate(&cert, out)?;
    }
    if json {
        print_json(&json!({
            "found": true,
            "evaluated": outcome.stats.evaluated,
            "gaps_seen": outcome.stats.gaps_seen,
            "lp_value": cert.lp_value.to_string(),
            "csp_value": cert.csp_value.to_string(),
            "instance": cert.instance,
            "digest": cert.digest,
        }));
    } else {
        println!(
            "found gap instance: n = {}, m = {}, opt^LP = {}, opt^CSP = {}",
            cert.instance.n,
            cert.instance.constraints.len(),
            cert.lp_value,
            cert.csp_value
        );
        for c in &cert.instance.constraints {
            let vars: Vec<String> = c.vars.iter().map(usize::to_string).collect();
            println!("  {}({}) weight {}", c.f, vars.join(", "), c.w);
        }
        if let Some(out) = out {
            println!("certificate written to {}", out.display());
        }
    }
    Ok(true)
}

pub fn verify_cert(path: &Path, json: bool, budget: u64) -> Result<bool> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let report = verify_certificate_json(&text, &path.display().to_string(), &VerifyOptions { brute_force_budget: budget })?;
    if json {
        print_json(&json!({
            "passed": report.passed(),
            "failure": report.failure,
            "csp_bound_checked": report.csp_bound_checked,
            "checks": report.checks,
        }));
    } else {
        println!("{report}");
    }
    Ok(report.passed())
}
