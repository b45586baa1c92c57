use std::sync::Arc;

use efx_core::allocation::{efx_existence_report, fairness_report, Allocation, FairnessReport, SearchConfig};
use efx_core::fixtures::{all_fixtures, fixture, run_fixture, show_allocation, FIXTURE_IDS};
use efx_core::instance::{parse_allocation, parse_instance, Instance, ParseOptions};
use efx_core::kneserlab::{
    verify_beta_monotone, verify_boundary_bound, verify_correspondence, verify_cross_intersecting, verify_diameter,
    BoundarySampling, KneserGraph, ScoreOracle,
};
use efx_core::protocols::{run_algorithm, Algorithm};
use efx_core::rational::{self, Rational};
use efx_core::valuation::all_identical;
use efx_core::{Error, Result};
use serde_json::{json, Value};

use crate::{CheckArgs, Command, EnumerateArgs, FixturesArgs, LabCommand, Outcome, SolveArgs, Source};

pub fn run(command: &Command, cfg: &SearchConfig) -> Result<Outcome> {
    match command {
        Command::Solve(args) => solve(args, cfg),
        Command::Check(args) => check(args, cfg),
        Command::Enumerate(args) => enumerate(args, cfg),
        Command::Fixtures(args) => fixtures(args, cfg),
        Command::Lab(lab) => lab_command(lab),
    }
}

/// Writes a line to stdout; a closed pipe is not an error worth reporting.
fn out(line: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout().lock(), "{line}");
}

fn print(value: &Value) {
    out(&serde_json::to_string_pretty(value).expect("JSON values serialize"));
}

fn load(source: &Source, allow_nonmonotone: bool) -> Result<Instance> {
    match (&source.instance, &source.fixture) {
        (Some(path), None) => parse_instance(path, ParseOptions { allow_nonmonotone }),
        (None, Some(id)) => fixture(id)
            .map(|f| f.instance)
            .ok_or_else(|| Error::Usage(format!("unknown fixture {id:?}; known: {}", FIXTURE_IDS.join(", ")))),
        _ => Err(Error::Usage("pass exactly one of --instance and --fixture".into())),
    }
}

fn c_values(raw: &[String]) -> Result<Vec<Rational>> {
    if raw.is_empty() {
        return Ok(vec![rational::half()]);
    }
    raw.iter().map(|s| rational::parse_nonneg(s)).collect()
}

fn utilities(inst: &Instance, a: &Allocation) -> Result<Vec<String>> {
    Ok(a.utilities(&inst.valuations)?.iter().map(rational::format).collect())
}

/// Fairness report with Pareto optimality when the scan fits the budget.
fn report_with_optional_pareto(
    inst: &Instance,
    a: &Allocation,
    cs: &[Rational],
    cfg: &SearchConfig,
    notes: &mut Vec<String>,
) -> Result<FairnessReport> {
    match fairness_report(a, &inst.valuations, cs, true, cfg) {
        Err(Error::Capacity { needed, limit, .. }) => {
            notes.push(format!(
                "pareto_optimal not decided: {needed} allocations exceed the limit of {limit}"
            ));
            fairness_report(a, &inst.valuations, cs, false, cfg)
        }
        other => other,
    }
}

fn solve(args: &SolveArgs, cfg: &SearchConfig) -> Result<Outcome> {
    let inst = load(&args.source, args.allow_nonmonotone)?;
    let algorithm: Algorithm = args.algorithm.parse()?;
    let cs = c_values(&args.c)?;
    let normalize = algorithm.uses_normalization() && !args.no_normalize && !all_identical(&inst.valuations);
    let out = run_algorithm(algorithm, &inst.valuations, normalize, cfg)?;
    let mut notes = Vec::new();
    let fairness = report_with_optional_pareto(&inst, &out.allocation, &cs, cfg, &mut notes)?;
    let mut report = json!({
        "algorithm": algorithm.name(),
        "normalized": normalize,
        "allocation": out.allocation,
        "display": show_allocation(&inst, &out.allocation),
        "utilities": utilities(&inst, &out.allocation)?,
        "fairness": fairness,
        "notes": notes,
    });
    if let Some(trace) = &out.trace {
        report["rounds"] = trace.round_count.into();
        report["round_limit"] = trace.round_limit.to_string().into();
        if let Some(path) = &args.trace {
            let text = serde_json::to_string_pretty(trace).expect("trace serializes");
            std::fs::write(path, text + "\n")
                .map_err(|e| Error::Usage(format!("cannot write {}: {e}", path.display())))?;
            report["trace_file"] = path.display().to_string().into();
        }
    } else if args.trace.is_some() {
        return Err(Error::Usage("--trace is only produced by half-efx".into()));
    }
    print(&report);
    Ok(Outcome::Ok)
}

fn check(args: &CheckArgs, cfg: &SearchConfig) -> Result<Outcome> {
    let inst = load(&args.source, args.allow_nonmonotone)?;
    let allocation = parse_allocation(&args.allocation, inst.m)?;
    if allocation.players() != inst.n {
        return Err(Error::Usage(format!(
            "allocation has {} bundles, instance has {} players",
            allocation.players(),
            inst.n
        )));
    }
    if !allocation.is_complete() && !args.partial {
        let missing: Vec<String> = (0..inst.m)
            .filter(|&g| allocation.owner(g).is_none())
            .map(|g| inst.good_name(g))
            .collect();
        return Err(Error::Usage(format!(
            "goods {} are unassigned; pass --partial to accept",
            missing.join(", ")
        )));
    }
    let cs = c_values(&args.c)?;
    let fairness = fairness_report(&allocation, &inst.valuations, &cs, args.pareto, cfg)?;
    print(&json!({
        "allocation": allocation,
        "display": show_allocation(&inst, &allocation),
        "complete": allocation.is_complete(),
        "utilities": utilities(&inst, &allocation)?,
        "fairness": fairness,
    }));
    Ok(Outcome::Ok)
}

fn enumerate(args: &EnumerateArgs, cfg: &SearchConfig) -> Result<Outcome> {
    let inst = load(&args.source, args.allow_nonmonotone)?;
    let r = efx_existence_report(&inst.valuations, args.pareto, cfg)?;
    let display: Vec<String> = r.witnesses.iter().map(|a| show_allocation(&inst, a)).collect();
    print(&json!({
        "require_po": args.pareto,
        "exists": r.exists,
        "examined": r.examined,
        "count": r.witnesses.len(),
        "witnesses": r.witnesses,
        "display": display,
    }));
    Ok(Outcome::Ok)
}

fn fixtures(args: &FixturesArgs, cfg: &SearchConfig) -> Result<Outcome> {
    if !args.run {
        for f in all_fixtures() {
            out(&format!(
                "{:<11} {:>2} assertions  {}",
                f.id,
                f.assertions.len(),
                f.title
            ));
        }
        return Ok(Outcome::Ok);
    }
    let mut failed = 0;
    let mut total = 0;
    for f in all_fixtures() {
        for o in run_fixture(&f, cfg) {
            total += 1;
            let status = if o.passed { "PASS" } else { "FAIL" };
            failed += usize::from(!o.passed);
            out(&format!("{:<11} {status}  {}  [{}]", o.fixture, o.assertion, o.detail));
        }
    }
    out(&format!(
        "{} fixtures, {total} assertions, {failed} failed",
        FIXTURE_IDS.len()
    ));
    Ok(if failed == 0 { Outcome::Ok } else { Outcome::Failed })
}

fn verdict(holds: bool, value: Value) -> Outcome {
    print(&value);
    if holds {
        Outcome::Ok
    } else {
        Outcome::Failed
    }
}

fn lab_command(lab: &LabCommand) -> Result<Outcome> {
    match *lab {
        LabCommand::Correspondence { k, seed, max_score } => {
            let n = 2 * k + 1;
            let f = match seed {
                Some(s) => ScoreOracle::random(n, k, max_score, s)?,
                None => ScoreOracle::constant(n, k, 0)?,
            };
            let r = verify_correspondence(k, Arc::new(f))?;
            Ok(verdict(r.holds, serde_json::to_value(&r).expect("report serializes")))
        }
        LabCommand::Diameter { k } => {
            let r = verify_diameter(k)?;
            Ok(verdict(r.holds, serde_json::to_value(&r).expect("report serializes")))
        }
        LabCommand::Boundary { k, r, samples, seed } => {
            let g = KneserGraph::odd(k)?;
            let sampling = samples.map(|samples| BoundarySampling { samples, seed });
            let rep = verify_boundary_bound(&g, r, sampling)?;
            Ok(verdict(
                rep.holds,
                serde_json::to_value(&rep).expect("report serializes"),
            ))
        }
        LabCommand::Beta { k } => {
            let r = verify_beta_monotone(k)?;
            Ok(verdict(r.holds, serde_json::to_value(&r).expect("report serializes")))
        }
        LabCommand::CrossIntersect { n, k } => {
            let r = verify_cross_intersecting(n, k)?;
            Ok(verdict(
                r.holds && r.tight,
                serde_json::to_value(&r).expect("report serializes"),
            ))
        }
    }
}
