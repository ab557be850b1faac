mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cspgap::csp::brute::DEFAULT_BRUTE_FORCE_BUDGET;
use cspgap::Rational;

/// Exit status 0 means an affirmative answer, 1 a negative one and 2 an
/// operational error.
#[derive(Parser, Debug)]
#[command(name = "cspgap", version, about = "Basic LP integrality gaps for Max-CSP predicate families")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn rational(s: &str) -> Result<Rational, String> {
    s.parse::<Rational>().map_err(|e| e.to_string())
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Exhaustive,
    Random,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Arity, alphabet, trivial threshold bracket, width and one-wise support.
    FamilyStats {
        family: PathBuf,
        #[arg(long)]
        json: bool,
        /// Target gap between the product lower bound and its certified maximum.
        #[arg(long, value_parser = rational, default_value = "1/1024")]
        precision: Rational,
        /// Instances evaluated for the empirical upper bound.
        #[arg(long, default_value_t = 256)]
        budget: u64,
        /// Largest instance size for the empirical upper bound.
        #[arg(long, default_value_t = 5)]
        n_max: usize,
    },
    /// Solves the basic LP of an instance.
    LpSolve {
        instance: PathBuf,
        #[arg(long)]
        json: bool,
        /// Also compute the CSP optimum exhaustively.
        #[arg(long)]
        brute_force: bool,
        /// Print the local distributions and marginals.
        #[arg(long)]
        dump: bool,
        /// Cap on assignments enumerated by --brute-force.
        #[arg(long, default_value_t = DEFAULT_BRUTE_FORCE_BUDGET)]
        budget: u64,
    },
    /// Decides whether an instance is a (gamma, beta) gap instance.
    GapCheck {
        instance: PathBuf,
        #[arg(long, value_parser = rational)]
        gamma: Rational,
        #[arg(long, value_parser = rational)]
        beta: Rational,
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cap on assignments enumerated.
        #[arg(long, default_value_t = DEFAULT_BRUTE_FORCE_BUDGET)]
        budget: u64,
        /// Certificate destination.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Searches instances of a family for a (gamma, beta) gap.
    GapSearch {
        family: PathBuf,
        #[arg(long, value_parser = rational)]
        gamma: Rational,
        #[arg(long, value_parser = rational)]
        beta: Rational,
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Maximum number of instances evaluated.
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        #[arg(long)]
        n_min: Option<usize>,
        #[arg(long, default_value_t = 5)]
        n_max: usize,
        #[arg(long, default_value_t = 8)]
        max_constraints: usize,
        #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
        mode: Mode,
        /// Keep the instance with the largest gap instead of the first one.
        #[arg(long)]
        maximize_gap: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-checks every claim of a certificate.
    VerifyCert {
        certificate: PathBuf,
        #[arg(long)]
        json: bool,
        /// Cap on assignments enumerated when re-deriving the CSP optimum.
        #[arg(long, default_value_t = DEFAULT_BRUTE_FORCE_BUDGET)]
        budget: u64,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::FamilyStats {
            family,
            json,
            precision,
            budget,
            n_max,
        } => commands::family_stats(&family, json, &precision, budget, n_max),
        Command::LpSolve {
            instance,
            json,
            brute_force,
            dump,
            budget,
        } => commands::lp_solve(&instance, json, brute_force, dump, budget),
        Command::GapCheck {
            instance,
            gamma,
            beta,
            json,
            seed,
            budget,
            out,
        } => commands::gap_check(&instance, &gamma, &beta, json, seed, budget, out.as_deref()),
        Command::GapSearch {
            family,
            gamma,
            beta,
            json,
            seed,
            budget,
            n_min,
            n_max,
            max_constraints,
            mode,
            maximize_gap,
            out,
        } => {
            let opts = commands::SearchArgs {
                gamma,
                beta,
                seed,
                budget,
                n_min,
                n_max,
                max_constraints,
                random: matches!(mode, Mode::Random),
                maximize_gap,
            };
            commands::gap_search(&family, &opts, json, out.as_deref())
        }
        Command::VerifyCert {
            certificate,
            json,
            budget,
        } => commands::verify_cert(&certificate, json, budget),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
