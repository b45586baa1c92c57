//! `efx`: solve, check and enumerate fair-division instances, run the
//! bundled fixtures and the Kneser-graph lab.
//!
//! Exit codes: 0 success, 1 failed assertion, 2 capacity exceeded,
//! 3 usage or precondition error. Reports go to stdout as JSON; errors go
//! to stderr as a JSON object with `error` and `message` fields.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use efx_core::allocation::{SearchConfig, DEFAULT_MAX_STATES};
use efx_core::Error;

#[derive(Parser, Debug)]
#[command(name = "efx", version, about = "Exact fair division of indivisible goods")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Worker threads for exhaustive scans; results do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,

    /// Largest number of allocations an exhaustive scan may visit.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_STATES)]
    pub max_states: u128,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run an allocation algorithm and report the result with its fairness flags.
    Solve(SolveArgs),
    /// Evaluate the fairness flags of a given allocation.
    Check(CheckArgs),
    /// Decide whether an EFX (optionally also Pareto-optimal) allocation exists.
    Enumerate(EnumerateArgs),
    /// List the bundled fixtures, or run their expectations with --run.
    Fixtures(FixturesArgs),
    /// Kneser-graph experiments.
    #[command(subcommand)]
    Lab(LabCommand),
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// Instance file (JSON).
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Bundled fixture id: fig1, fig4, thm6, thm7, thm9, sec6-left, sec6-right.
    #[arg(long)]
    pub fixture: Option<String>,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub source: Source,
    /// leximin, leximin++, mnw, cut-and-choose, half-efx, same-ranking,
    /// two-player-additive or efx-po-identical.
    #[arg(long)]
    pub algorithm: String,
    /// c values for the c-EFX flags (`1/2`, `2/3`, ...). Defaults to 1/2.
    #[arg(long = "c")]
    pub c: Vec<String>,
    /// Compare raw values in the leximin variants even when players differ.
    #[arg(long)]
    pub no_normalize: bool,
    /// Write the half-efx round trace to this file.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Accept table valuations that decrease somewhere.
    #[arg(long)]
    pub allow_nonmonotone: bool,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[command(flatten)]
    pub source: Source,
    /// Allocation file: `{"bundles": [[0, 2], [1]]}`.
    #[arg(long)]
    pub allocation: PathBuf,
    #[arg(long = "c")]
    pub c: Vec<String>,
    /// Also decide Pareto optimality (exhaustive).
    #[arg(long)]
    pub pareto: bool,
    /// Accept allocations that leave goods unassigned.
    #[arg(long)]
    pub partial: bool,
    /// Accept table valuations that decrease somewhere.
    #[arg(long)]
    pub allow_nonmonotone: bool,
}

#[derive(Args, Debug)]
pub struct EnumerateArgs {
    #[command(flatten)]
    pub source: Source,
    /// Only count allocations that are also Pareto optimal.
    #[arg(long)]
    pub pareto: bool,
    /// Accept table valuations that decrease somewhere.
    #[arg(long)]
    pub allow_nonmonotone: bool,
}

#[derive(Args, Debug)]
pub struct FixturesArgs {
    #[arg(long)]
    pub run: bool,
}

#[derive(Subcommand, Debug)]
pub enum LabCommand {
    /// EFX allocations of the reduction instance versus local maxima.
    Correspondence {
        /// Graph K(2k+1, k); k must be 1..=3.
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Seed for random scores; constant scores when omitted.
        #[arg(long)]
        seed: Option<u64>,
        /// Random scores are drawn from 0..=max-score.
        #[arg(long, default_value_t = 9)]
        max_score: u64,
    },
    /// Diameter of K(2k+1, k) by breadth-first search.
    Diameter {
        /// Graph K(2k+1, k).
        #[arg(long)]
        k: usize,
    },
    /// Smallest boundary of an r-vertex set in K(2k+1, k) against its lower bound.
    Boundary {
        /// Graph K(2k+1, k).
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Size of the vertex sets.
        #[arg(long)]
        r: usize,
        /// Random r-sets to try when exhaustive search is too large.
        #[arg(long)]
        samples: Option<u64>,
        /// Seed for the sampled r-sets.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Monotonicity of the boundary lower bound in r.
    Beta {
        /// Graph K(2k+1, k); k must be 1..=20.
        #[arg(long)]
        k: usize,
    },
    /// Largest |X||Y| over cross-intersecting families of k-subsets of 0..n.
    CrossIntersect {
        /// Ground set 0..n.
        #[arg(long, default_value_t = 5)]
        n: usize,
        /// Size of the subsets.
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
}

/// Outcome of a command that ran to completion.
pub enum Outcome {
    Ok,
    /// Some expectation did not hold.
    Failed,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Capacity { .. } => 2,
        Error::Usage(_) | Error::Precondition(_) | Error::Schema { .. } | Error::Rational(_) => 3,
        Error::Invariant(_) => 1,
    }
}

fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::Capacity { .. } => "capacity",
        Error::Usage(_) => "usage",
        Error::Precondition(_) => "precondition",
        Error::Schema { .. } => "schema",
        Error::Rational(_) => "rational",
        Error::Invariant(_) => "invariant",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cfg = SearchConfig {
        max_states: cli.max_states,
        jobs: cli.jobs,
    };
    match commands::run(&cli.command, &cfg) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(err) => {
            let mut body = serde_json::json!({ "error": error_kind(&err), "message": err.to_string() });
            if let Error::Capacity { needed, limit, .. } = &err {
                body["needed"] = needed.to_string().into();
                body["limit"] = limit.to_string().into();
            }
            if let Error::Schema { pointer, .. } = &err {
                body["pointer"] = pointer.clone().into();
            }
            eprintln!("{body}");
            ExitCode::from(exit_code(&err))
        }
    }
}
