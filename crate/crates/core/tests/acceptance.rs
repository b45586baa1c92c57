//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach the test log.

mod common;

use std::collections::HashSet;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use efx_core::allocation::{
    dominates, efx_existence_report, enumerate_allocations, fairness_report, pareto_dominator, Allocation, EnvyWitness,
    SearchConfig,
};
use efx_core::goods::GoodSet;
use efx_core::kneserlab::{
    build_reduction_valuation, lower_bound_value, verify_beta_monotone, verify_boundary_bound, verify_correspondence,
    verify_cross_intersecting, verify_diameter, KneserGraph, ScoreOracle,
};
use efx_core::leximin::{leximin_cmp, solve, ComparatorKind};
use efx_core::protocols::{cut_and_choose, half_efx, max_nash_welfare, same_ranking_efx};
use efx_core::rational::{frac, half, int, Rational};
use efx_core::valuation::{check_class, generate_random, ClassLimits, GeneratorKind, Valuation, ValueOracle};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn cfg() -> SearchConfig {
    SearchConfig::default()
}

fn alloc(bundles: &[&[usize]], m: usize) -> Allocation {
    Allocation::from_goods(bundles, m).unwrap()
}

fn additive(rows: &[&[i64]]) -> Vec<Valuation> {
    rows.iter().map(|r| Valuation::additive_ints(r).unwrap()).collect()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let out = f();
    (out, t.elapsed())
}

fn shape(n: usize, max_m: usize, seed: u64) -> (usize, usize) {
    (2 + (seed as usize % (n - 1)), 1 + (seed as usize / (n - 1)) % max_m)
}

/// `t + ε(|S| − t)` for the largest trigger set contained in `S`.
fn nested(alpha: &[usize], beta: &[usize], gamma: &[usize], eps: &Rational) -> Valuation {
    let within = |set: &GoodSet, xs: &[usize]| xs.iter().all(|&g| set.contains(g));
    Valuation::table_from_fn(5, |s| {
        let size = int(s.len() as i64);
        let t = if within(&s, gamma) {
            3
        } else if within(&s, beta) {
            2
        } else if within(&s, alpha) {
            1
        } else {
            0
        };
        int(t) + eps * (size - int(t))
    })
    .unwrap()
}

fn three_good_example() -> Verdict {
    let vals = additive(&[&[5, 3, 1], &[5, 1, 3]]);
    let (res, took) = timed(|| -> Verdict {
        let lex = solve(&vals, ComparatorKind::Leximin, true, &cfg()).unwrap();
        ensure!(
            lex == alloc(&[&[0], &[1, 2]], 3) || lex == alloc(&[&[1, 2], &[0]], 3),
            "leximin returned {:?}",
            lex.to_goods()
        );
        let r = fairness_report(&lex, &vals, &[], true, &cfg()).unwrap();
        ensure!(r.efx && r.pareto_optimal == Some(true), "leximin flags {:?}", r);
        ensure!(
            common::is_efx(&lex, &vals) && common::is_pareto_optimal(&lex, &vals),
            "oracle disagrees on leximin"
        );

        let mnw = max_nash_welfare(&vals, &cfg()).unwrap();
        ensure!(
            mnw == alloc(&[&[0, 1], &[2]], 3) || mnw == alloc(&[&[2], &[0, 1]], 3),
            "mnw returned {:?}",
            mnw.to_goods()
        );
        let r = fairness_report(&mnw, &vals, &[], true, &cfg()).unwrap();
        ensure!(r.ef1 && !r.efx && r.pareto_optimal == Some(true), "mnw flags {:?}", r);
        let envied = mnw.owner(1).unwrap();
        let want = EnvyWitness {
            envious: 1 - envied,
            envied,
            good: Some(1),
        };
        ensure!(r.witnesses.efx == Some(want), "mnw witness {:?}", r.witnesses.efx);
        ensure!(
            common::is_ef1(&mnw, &vals) && !common::is_efx(&mnw, &vals) && common::is_pareto_optimal(&mnw, &vals),
            "oracle disagrees on mnw"
        );
        Ok(format!("leximin {:?}, mnw {:?}", lex.to_goods(), mnw.to_goods()))
    });
    let detail = res?;
    ensure!(took < Duration::from_secs(1), "took {took:?}");
    Ok(format!("{detail} in {took:.2?}"))
}

fn impossibility() -> Verdict {
    let eps = frac(1, 10);
    let thm9 = vec![
        nested(&[0], &[1, 3], &[0, 2, 3], &eps),
        nested(&[1], &[0, 3], &[1, 3, 4], &eps),
    ];
    let row = |v: &[i64]| Valuation::table(2, v.iter().map(|&x| int(x)).collect()).unwrap();
    let cases = [
        ("thm6", additive(&[&[2, 1, 0], &[2, 0, 1]])),
        ("thm7", vec![row(&[0, 0, 1, 2]), row(&[0, 0, 1, 2])]),
        ("thm9", thm9.clone()),
    ];
    let mut notes = Vec::new();
    for (id, vals) in &cases {
        let (rep, took) = timed(|| efx_existence_report(vals, true, &cfg()).unwrap());
        ensure!(!rep.exists, "{id}: an EFX and PO allocation was reported");
        ensure!(took < Duration::from_secs(1), "{id} took {took:?}");
        let any_oracle = common::all_allocations(vals.len(), vals[0].goods())
            .iter()
            .any(|a| common::is_efx(a, vals) && common::is_pareto_optimal(a, vals));
        ensure!(!any_oracle, "{id}: oracle finds an EFX and PO allocation");
        notes.push(format!("{id} {took:.2?}"));
    }
    let (rep, took) = timed(|| efx_existence_report(&thm9, false, &cfg()).unwrap());
    ensure!(took < Duration::from_secs(1), "thm9 EFX scan took {took:?}");
    let target = alloc(&[&[0, 2, 4], &[1, 3]], 5);
    ensure!(rep.witnesses.contains(&target), "thm9 witnesses {:?}", rep.witnesses);
    let dom = alloc(&[&[0, 2, 3], &[1, 4]], 5);
    ensure!(dominates(&dom, &target, &thm9).unwrap(), "domination not confirmed");
    ensure!(
        pareto_dominator(&target, &thm9, &cfg()).unwrap().is_some(),
        "PO scan found no dominator"
    );
    ensure!(
        !common::is_pareto_optimal(&target, &thm9),
        "oracle calls the witness PO"
    );
    Ok(format!(
        "{}; thm9 has {} EFX allocations",
        notes.join(", "),
        rep.witnesses.len()
    ))
}

fn three_player_counterexample() -> Verdict {
    let vals = additive(&[&[14, 3, 2, 1], &[7, 6, 4, 3], &[20, 0, 0, 0]]);
    let (a, took) = timed(|| solve(&vals, ComparatorKind::LeximinPlusPlus, false, &cfg()).unwrap());
    ensure!(
        a == alloc(&[&[1, 3], &[2], &[0]], 4),
        "leximin++ returned {:?}",
        a.to_goods()
    );
    let r = fairness_report(&a, &vals, &[], false, &cfg()).unwrap();
    ensure!(!r.efx, "reported EFX");
    let w = r.witnesses.efx.clone().ok_or("no witness")?;
    ensure!(
        w == EnvyWitness {
            envious: 1,
            envied: 0,
            good: Some(3)
        },
        "witness {w:?}"
    );
    let (own, other) = (common::val(&vals[1], &[2]), common::val(&vals[1], &[1]));
    ensure!(own == int(4) && other == int(6), "v_2 values {own} and {other}");
    ensure!(took < Duration::from_secs(1), "took {took:?}");
    Ok(format!("witness v_2({{c}})=4 < v_2({{b}})=6 in {took:.2?}"))
}

/// Strict weak order laws over a precomputed `better[a][b]` table.
fn order_violations(better: &[Vec<bool>], triples: impl Iterator<Item = (usize, usize, usize)>) -> u64 {
    let inc = |a: usize, b: usize| !better[a][b] && !better[b][a];
    let mut bad = 0;
    for (a, row) in better.iter().enumerate() {
        if row[a] {
            bad += 1;
        }
        for (b, &ab) in row.iter().enumerate() {
            if ab && better[b][a] {
                bad += 1;
            }
        }
    }
    for (a, b, c) in triples {
        if better[a][b] && better[b][c] && !better[a][c] {
            bad += 1;
        }
        if inc(a, b) && inc(b, c) && !inc(a, c) {
            bad += 1;
        }
    }
    bad
}

fn comparator_table(allocs: &[Allocation], vals: &[Valuation], kind: ComparatorKind) -> Vec<Vec<bool>> {
    allocs
        .iter()
        .map(|a| allocs.iter().map(|b| leximin_cmp(a, b, vals, kind).unwrap()).collect())
        .collect()
}

fn comparator_laws() -> Verdict {
    let kinds = [ComparatorKind::Leximin, ComparatorKind::LeximinPlusPlus];
    let mut violations = 0;
    let mut checked = 0u64;
    let small = common::all_allocations(2, 3);
    for seed in 0..50 {
        let vals = generate_random(GeneratorKind::DistinctTableMonotone, 3, 2, seed).unwrap();
        for kind in kinds {
            let t = comparator_table(&small, &vals, kind);
            let n = small.len();
            let all = (0..n).flat_map(move |a| (0..n).flat_map(move |b| (0..n).map(move |c| (a, b, c))));
            violations += order_violations(&t, all);
            checked += (n * n * n) as u64;
        }
    }
    let large = common::all_allocations(3, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for seed in 0..10 {
        let vals = generate_random(GeneratorKind::DistinctTableMonotone, 4, 3, 100 + seed).unwrap();
        for kind in kinds {
            let t = comparator_table(&large, &vals, kind);
            let n = large.len();
            let sample: Vec<_> = (0..50_000)
                .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n)))
                .collect();
            violations += order_violations(&t, sample.into_iter());
            checked += 50_000;
        }
    }
    ensure!(violations == 0, "{violations} violations");
    Ok(format!("{checked} triples, 0 violations"))
}

fn leximin_suites() -> Verdict {
    let start = Instant::now();
    let mut bad = Vec::new();
    for seed in 0..300 {
        let (n, m) = shape(3, 6, seed);
        let vals = generate_random(GeneratorKind::IdenticalTableMonotone, m, n, seed).unwrap();
        let a = solve(&vals, ComparatorKind::LeximinPlusPlus, false, &cfg()).unwrap();
        if !common::is_efx(&a, &vals) {
            bad.push(format!("(a) seed {seed}"));
        }
    }
    for seed in 0..500 {
        let m = 1 + seed as usize % 6;
        let vals = generate_random(GeneratorKind::DistinctTableMonotone, m, 2, 1000 + seed).unwrap();
        let a = cut_and_choose(&vals[0], &vals[1], &cfg()).unwrap();
        if !common::is_efx(&a, &vals) {
            bad.push(format!("(b) seed {seed}"));
        }
    }
    for seed in 0..200 {
        let (n, m) = shape(3, 6, seed);
        let vals = generate_random(GeneratorKind::IdenticalTableStrict, m, n, 2000 + seed).unwrap();
        let a = solve(&vals, ComparatorKind::Leximin, false, &cfg()).unwrap();
        if !(common::is_efx(&a, &vals) && common::is_pareto_optimal(&a, &vals)) {
            bad.push(format!("(c) seed {seed}"));
        }
    }
    for seed in 0..300 {
        let m = 1 + seed as usize % 8;
        let vals = generate_random(GeneratorKind::Additive, m, 2, 3000 + seed).unwrap();
        let a = solve(&vals, ComparatorKind::Leximin, true, &cfg()).unwrap();
        if !(common::is_efx(&a, &vals) && common::is_pareto_optimal(&a, &vals)) {
            bad.push(format!("(d) seed {seed}"));
        }
    }
    let took = start.elapsed();
    ensure!(bad.is_empty(), "violations: {}", bad.join(", "));
    ensure!(took < Duration::from_secs(300), "took {took:?}");
    Ok(format!("1300 instances, 0 violations in {took:.2?}"))
}

fn half_efx_suite() -> Verdict {
    let mut max_ratio = Rational::from_integer(0.into());
    let mut over_3m = 0;
    for seed in 0..300 {
        let (n, m) = shape(3, 7, seed);
        let vals = generate_random(GeneratorKind::BudgetAdditive, m, n, 4000 + seed).unwrap();
        let (a, trace) = half_efx(&vals).unwrap();
        ensure!(a.is_complete(), "seed {seed}: incomplete output");
        ensure!(
            common::is_c_efx(&a, &vals, &half()),
            "seed {seed}: output is not 1/2-EFX"
        );
        for r in &trace.rounds {
            ensure!(
                common::is_c_efx(&r.snapshot, &vals, &half()),
                "seed {seed}: round {} snapshot",
                r.round
            );
        }
        let limit = (m as u128) * ((n as u128) + 1).pow(m as u32);
        ensure!(
            trace.round_limit == limit,
            "seed {seed}: limit {} != {limit}",
            trace.round_limit
        );
        ensure!(
            (trace.round_count as u128) <= limit,
            "seed {seed}: {} rounds",
            trace.round_count
        );
        if trace.round_count > 3 * m as u64 {
            over_3m += 1;
        }
        max_ratio = max_ratio.max(frac(trace.round_count as i64, m as i64));
    }
    Ok(format!(
        "300 instances, 0 violations; max rounds/m = {max_ratio}, {over_3m} runs above 3m"
    ))
}

fn same_ranking_suite() -> Verdict {
    for seed in 0..300 {
        let n = 2 + seed as usize % 3;
        let m = 1 + (seed as usize / 3) % 10;
        let vals = generate_random(GeneratorKind::IdenticalRankingAdditive, m, n, 5000 + seed).unwrap();
        let a = same_ranking_efx(&vals).unwrap();
        ensure!(
            a.is_complete() && common::is_efx(&a, &vals),
            "seed {seed}: output is not EFX"
        );
    }
    let sizes = [10usize, 20, 40, 80];
    let mut points = Vec::new();
    for &m in &sizes {
        let vals = generate_random(GeneratorKind::IdenticalRankingAdditive, m, 4, 77).unwrap();
        same_ranking_efx(&vals).unwrap();
        let start = Instant::now();
        let mut runs = 0u32;
        while start.elapsed() < Duration::from_millis(200) {
            same_ranking_efx(&vals).unwrap();
            runs += 1;
        }
        let per_run = start.elapsed().as_secs_f64() / runs as f64;
        points.push(((m as f64).ln(), per_run.ln()));
    }
    let k = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / k, sy / k);
    let cov: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = points.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    let slope = cov / var;
    ensure!(slope <= 2.0, "fitted exponent {slope:.2}");
    Ok(format!(
        "300 instances EFX; fitted exponent {slope:.2} over m in {sizes:?}"
    ))
}

fn incomparability() -> Verdict {
    let left = additive(&[&[3, 1, 0], &[3, 0, 1]]);
    let a = alloc(&[&[0, 1], &[2]], 3);
    let r = fairness_report(&a, &left, &[half()], false, &cfg()).unwrap();
    ensure!(r.ef1 && r.c_efx(&half()) == Some(false), "left flags {:?}", r);
    ensure!(
        common::is_ef1(&a, &left) && !common::is_c_efx(&a, &left, &half()),
        "oracle disagrees on left"
    );

    let right = additive(&[&[1, 1, 1, 1], &[1, 1, 1, 1]]);
    let b = alloc(&[&[0, 1, 2], &[3]], 4);
    let r = fairness_report(&b, &right, &[half()], false, &cfg()).unwrap();
    ensure!(!r.ef1 && r.c_efx(&half()) == Some(true), "right flags {:?}", r);
    ensure!(
        !common::is_ef1(&b, &right) && common::is_c_efx(&b, &right, &half()),
        "oracle disagrees on right"
    );
    Ok("left EF1 and not 1/2-EFX, right 1/2-EFX and not EF1".into())
}

fn kneser_lab() -> Verdict {
    let (res, took) = timed(|| -> Result<(), String> {
        for seed in 0..100 {
            let f = Arc::new(ScoreOracle::random(5, 2, 9, seed).unwrap());
            let rep = verify_correspondence(2, f).unwrap();
            ensure!(
                rep.holds,
                "correspondence fails for seed {seed}: {:?}",
                rep.counterexample
            );
        }
        Ok(())
    });
    res?;
    ensure!(took < Duration::from_secs(10), "correspondence took {took:?}");

    let mut oracles = vec![ScoreOracle::constant(5, 2, 0).unwrap()];
    oracles.extend((0..20).map(|s| ScoreOracle::random(5, 2, 9, 900 + s).unwrap()));
    for f in oracles {
        let v = build_reduction_valuation(2, Arc::new(f)).unwrap();
        let rep = check_class(&v, &ClassLimits::default()).unwrap();
        ensure!(
            rep.submodular,
            "reduction valuation not submodular: {:?}",
            rep.witnesses
        );
    }

    let mut diameters = Vec::new();
    for k in 1..=6 {
        let rep = verify_diameter(k).unwrap();
        ensure!(rep.holds, "diameter fails at k={k}: {}", rep.diameter);
        diameters.push(rep.diameter);
    }

    let petersen = KneserGraph::odd(2).unwrap();
    for r in 1..=10 {
        let rep = verify_boundary_bound(&petersen, r, None).unwrap();
        ensure!(
            rep.holds && rep.exhaustive,
            "boundary bound fails at r={r}: mu={}",
            rep.mu
        );
    }
    for k in 1..=10 {
        ensure!(verify_beta_monotone(k).unwrap().holds, "beta not monotone at k={k}");
    }
    let cross = verify_cross_intersecting(5, 2).unwrap();
    ensure!(cross.max_product == 16, "max product {}", cross.max_product);
    let lb = lower_bound_value(2).unwrap();
    ensure!(lb == frac(4, 5), "lower bound value {lb}");
    Ok(format!(
        "correspondence 100/100 in {took:.2?}; diameters k=1..6 {diameters:?}; max product 16; 4/5"
    ))
}

fn oracle_equivalence() -> Verdict {
    let kinds = [
        GeneratorKind::Additive,
        GeneratorKind::DistinctTableMonotone,
        GeneratorKind::IdenticalTableMonotone,
        GeneratorKind::BudgetAdditive,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut optimal = 0;
    for seed in 0..1000u64 {
        let (n, m) = shape(3, 6, seed);
        let vals = generate_random(kinds[seed as usize % 4], m, n, 6000 + seed).unwrap();
        let a = if seed % 2 == 0 {
            solve(&vals, ComparatorKind::Leximin, false, &cfg()).unwrap()
        } else {
            let owners: Vec<usize> = (0..m).map(|_| rng.gen_range(0..n)).collect();
            let bundles: Vec<Vec<usize>> = (0..n).map(|i| (0..m).filter(|&g| owners[g] == i).collect()).collect();
            let refs: Vec<&[usize]> = bundles.iter().map(|b| b.as_slice()).collect();
            alloc(&refs, m)
        };
        let flag = fairness_report(&a, &vals, &[], true, &cfg()).unwrap().pareto_optimal;
        let truth = common::is_pareto_optimal(&a, &vals);
        ensure!(
            flag == Some(truth),
            "seed {seed}: library says {flag:?}, scan says {truth}"
        );
        optimal += truth as u32;
    }
    for n in 1..=4usize {
        for m in 0..=8usize {
            let all: Vec<Allocation> = enumerate_allocations(n, m, &cfg()).unwrap().collect();
            let distinct: HashSet<Vec<u128>> = all
                .iter()
                .map(|a| a.bundles().iter().map(|b| b.mask()).collect())
                .collect();
            let want = n.pow(m as u32);
            ensure!(
                all.len() == want && distinct.len() == want,
                "n={n} m={m}: {} allocations",
                all.len()
            );
            ensure!(
                all.iter().all(|a| a.is_complete() && a.players() == n),
                "n={n} m={m}: malformed allocation"
            );
        }
    }
    Ok(format!(
        "1000 instances agree ({optimal} PO); n^m distinct allocations for n<=4, m<=8"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (
            "three-good additive example: leximin and Nash welfare",
            three_good_example,
        ),
        ("no EFX and PO allocation on the impossibility instances", impossibility),
        ("three-player leximin++ counterexample", three_player_counterexample),
        ("leximin comparators are strict weak orders", comparator_laws),
        ("leximin, leximin++ and cut-and-choose fairness suites", leximin_suites),
        (
            "1/2-EFX envy-cycle procedure on budget-additive instances",
            half_efx_suite,
        ),
        ("identical-ranking procedure: EFX and scaling", same_ranking_suite),
        ("EF1 and 1/2-EFX are incomparable", incomparability),
        ("Kneser graph lab", kneser_lab),
        (
            "Pareto flag and enumeration agree with independent oracles",
            oracle_equivalence,
        ),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (verdict, took) = timed(check);
        match verdict {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail} [{took:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {why} [{took:.2?}]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
