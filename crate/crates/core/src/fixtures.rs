//! The worked examples as executable fixtures with declarative expectations.
//!
//! Goods are addressed by index (`a = 0`, `b = 1`, ...) and players are
//! 0-based throughout.

use serde::Serialize;

use crate::allocation::{
    dominates, efx_existence_report, fairness_report, pareto_dominator, Allocation, EnvyWitness, FairnessReport,
    SearchConfig,
};
use crate::error::Result;
use crate::goods::GoodSet;
use crate::instance::Instance;
use crate::protocols::{run_algorithm, Algorithm};
use crate::rational::{self, frac, int, Rational};
use crate::valuation::Valuation;

pub const FIXTURE_IDS: [&str; 7] = ["fig1", "fig4", "thm6", "thm7", "thm9", "sec6-left", "sec6-right"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Flag {
    EnvyFree,
    Ef1,
    Efx,
    CEfx(Rational),
    ParetoOptimal,
}

impl Flag {
    fn read(&self, r: &FairnessReport) -> Option<bool> {
        match self {
            Flag::EnvyFree => Some(r.envy_free),
            Flag::Ef1 => Some(r.ef1),
            Flag::Efx => Some(r.efx),
            Flag::CEfx(c) => r.c_efx(c),
            Flag::ParetoOptimal => r.pareto_optimal,
        }
    }

    fn label(&self) -> String {
        match self {
            Flag::EnvyFree => "envy_free".into(),
            Flag::Ef1 => "ef1".into(),
            Flag::Efx => "efx".into(),
            Flag::CEfx(c) => format!("c_efx[{}]", rational::format(c)),
            Flag::ParetoOptimal => "pareto_optimal".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Assertion {
    /// The solver returns one of `one_of` (empty: any) with the given flags.
    Solve {
        algorithm: Algorithm,
        normalize: bool,
        one_of: Vec<Allocation>,
        flags: Vec<(Flag, bool)>,
    },
    /// Flags of a fixed allocation, optionally with the EFX witness.
    Check {
        allocation: Allocation,
        flags: Vec<(Flag, bool)>,
        efx_witness: Option<EnvyWitness>,
    },
    /// Exhaustive EFX (and optionally PO) existence, with required witnesses.
    Existence {
        require_po: bool,
        exists: bool,
        includes: Vec<Allocation>,
    },
    /// `dominator` Pareto-dominates `dominated`, and the PO scan finds a dominator.
    Dominated {
        dominator: Allocation,
        dominated: Allocation,
    },
    /// Two solvers return different allocations.
    Differ { first: Algorithm, second: Algorithm },
}

impl Assertion {
    fn describe(&self, show: &dyn Fn(&Allocation) -> String) -> String {
        let flags = |f: &[(Flag, bool)]| {
            f.iter()
                .map(|(x, b)| format!("{}={b}", x.label()))
                .collect::<Vec<_>>()
                .join(" ")
        };
        match self {
            Assertion::Solve {
                algorithm,
                normalize,
                one_of,
                flags: f,
            } => {
                let norm = if *normalize { " normalized" } else { "" };
                let within = if one_of.is_empty() {
                    String::new()
                } else {
                    format!(" in {{{}}}", one_of.iter().map(show).collect::<Vec<_>>().join(", "))
                };
                format!("{algorithm}{norm}{within} {}", flags(f)).trim_end().to_string()
            }
            Assertion::Check {
                allocation, flags: f, ..
            } => format!("check {} {}", show(allocation), flags(f)),
            Assertion::Existence {
                require_po,
                exists,
                includes,
            } => {
                let what = if *require_po { "EFX and PO" } else { "EFX" };
                let mut s = format!("{what} allocation exists={exists}");
                if !includes.is_empty() {
                    s += &format!(
                        " including {}",
                        includes.iter().map(show).collect::<Vec<_>>().join(", ")
                    );
                }
                s
            }
            Assertion::Dominated { dominator, dominated } => {
                format!("{} dominates {}", show(dominator), show(dominated))
            }
            Assertion::Differ { first, second } => format!("{first} and {second} choose differently"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fixture {
    pub id: &'static str,
    pub title: &'static str,
    pub instance: Instance,
    pub assertions: Vec<Assertion>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AssertionOutcome {
    pub fixture: String,
    pub assertion: String,
    pub passed: bool,
    pub detail: String,
}

fn alloc(bundles: &[&[usize]], m: usize) -> Allocation {
    Allocation::from_goods(bundles, m).expect("fixture allocation")
}

fn additive(rows: &[&[i64]], names: &[&str]) -> Instance {
    let vals = rows
        .iter()
        .map(|r| Valuation::additive_ints(r).expect("fixture values"))
        .collect();
    Instance::new(vals).expect("fixture instance").with_goods(names)
}

/// The nested-threshold valuation over five goods: `t + ε(|S| − t)` for the
/// largest `t ∈ {3, 2, 1}` whose trigger set lies in `S`, and `ε|S|` otherwise.
pub fn nested_valuation(alpha: &[usize], beta: &[usize], gamma: &[usize], eps: &Rational) -> Valuation {
    let m = 5;
    let set = |g: &[usize]| GoodSet::from_goods(g.iter().copied(), m).expect("in universe");
    let levels = [(set(gamma), 3), (set(beta), 2), (set(alpha), 1)];
    Valuation::table_from_fn(m, |s| {
        let size = s.len() as i64;
        match levels.iter().find(|(t, _)| t.is_subset(&s)) {
            Some(&(_, t)) => int(t) + eps * int(size - t),
            None => eps * int(size),
        }
    })
    .expect("nested valuation is monotone")
}

pub fn fixture(id: &str) -> Option<Fixture> {
    let mut f = match id {
        "fig1" => Fixture {
            id: "fig1",
            title: "two players, three goods: Nash welfare is not EFX",
            instance: additive(&[&[5, 3, 1], &[5, 1, 3]], &["a", "b", "c"]),
            assertions: vec![
                Assertion::Solve {
                    algorithm: Algorithm::Leximin,
                    normalize: true,
                    one_of: vec![alloc(&[&[0], &[1, 2]], 3), alloc(&[&[1, 2], &[0]], 3)],
                    flags: vec![(Flag::Efx, true), (Flag::ParetoOptimal, true)],
                },
                Assertion::Solve {
                    algorithm: Algorithm::MaxNashWelfare,
                    normalize: false,
                    one_of: vec![alloc(&[&[0, 1], &[2]], 3), alloc(&[&[1], &[0, 2]], 3)],
                    flags: vec![(Flag::Ef1, true), (Flag::Efx, false), (Flag::ParetoOptimal, true)],
                },
                Assertion::Solve {
                    algorithm: Algorithm::LeximinPlusPlus,
                    normalize: true,
                    one_of: vec![],
                    flags: vec![(Flag::Efx, true), (Flag::ParetoOptimal, true)],
                },
                Assertion::Check {
                    allocation: alloc(&[&[0, 1], &[2]], 3),
                    flags: vec![(Flag::Ef1, true), (Flag::Efx, false), (Flag::ParetoOptimal, true)],
                    efx_witness: Some(EnvyWitness {
                        envious: 1,
                        envied: 0,
                        good: Some(1),
                    }),
                },
                Assertion::Check {
                    allocation: alloc(&[&[0], &[1, 2]], 3),
                    flags: vec![(Flag::Efx, true), (Flag::ParetoOptimal, true)],
                    efx_witness: None,
                },
            ],
        },
        "fig4" => Fixture {
            id: "fig4",
            title: "three players: the leximin++ allocation is not EFX",
            instance: additive(&[&[14, 3, 2, 1], &[7, 6, 4, 3], &[20, 0, 0, 0]], &["a", "b", "c", "d"]),
            assertions: vec![
                Assertion::Solve {
                    algorithm: Algorithm::LeximinPlusPlus,
                    normalize: false,
                    one_of: vec![alloc(&[&[1, 3], &[2], &[0]], 4)],
                    flags: vec![(Flag::Efx, false)],
                },
                Assertion::Check {
                    allocation: alloc(&[&[1, 3], &[2], &[0]], 4),
                    flags: vec![(Flag::Efx, false)],
                    efx_witness: Some(EnvyWitness {
                        envious: 1,
                        envied: 0,
                        good: Some(3),
                    }),
                },
            ],
        },
        "thm6" => Fixture {
            id: "thm6",
            title: "zero marginal values: no allocation is both EFX and PO",
            instance: additive(&[&[2, 1, 0], &[2, 0, 1]], &["a", "b", "c"]),
            assertions: vec![
                Assertion::Existence {
                    require_po: true,
                    exists: false,
                    includes: vec![],
                },
                Assertion::Existence {
                    require_po: false,
                    exists: true,
                    includes: vec![],
                },
                Assertion::Solve {
                    algorithm: Algorithm::MaxNashWelfare,
                    normalize: false,
                    one_of: vec![],
                    flags: vec![(Flag::Ef1, true), (Flag::ParetoOptimal, true)],
                },
            ],
        },
        "thm7" => {
            let v = Valuation::table(2, vec![int(0), int(0), int(1), int(2)]).expect("monotone");
            Fixture {
                id: "thm7",
                title: "identical general valuations: leximin and leximin++ disagree",
                instance: Instance::new(vec![v.clone(), v])
                    .expect("instance")
                    .with_goods(&["a", "b"]),
                assertions: vec![
                    Assertion::Existence {
                        require_po: false,
                        exists: true,
                        includes: vec![alloc(&[&[1], &[0]], 2), alloc(&[&[0], &[1]], 2)],
                    },
                    Assertion::Existence {
                        require_po: true,
                        exists: false,
                        includes: vec![],
                    },
                    Assertion::Solve {
                        algorithm: Algorithm::LeximinPlusPlus,
                        normalize: false,
                        one_of: vec![alloc(&[&[1], &[0]], 2), alloc(&[&[0], &[1]], 2)],
                        flags: vec![(Flag::Efx, true)],
                    },
                    Assertion::Solve {
                        algorithm: Algorithm::Leximin,
                        normalize: false,
                        one_of: vec![alloc(&[&[0, 1], &[]], 2), alloc(&[&[], &[0, 1]], 2)],
                        flags: vec![(Flag::Efx, false), (Flag::ParetoOptimal, true)],
                    },
                    Assertion::Differ {
                        first: Algorithm::Leximin,
                        second: Algorithm::LeximinPlusPlus,
                    },
                ],
            }
        }
        "thm9" => {
            let eps = frac(1, 10);
            let v1 = nested_valuation(&[0], &[1, 3], &[0, 2, 3], &eps);
            let v2 = nested_valuation(&[1], &[0, 3], &[1, 3, 4], &eps);
            Fixture {
                id: "thm9",
                title: "two players, nested thresholds with eps = 1/10: no EFX and PO allocation",
                instance: Instance::new(vec![v1, v2])
                    .expect("instance")
                    .with_goods(&["a", "b", "c", "d", "e"]),
                assertions: vec![
                    Assertion::Existence {
                        require_po: true,
                        exists: false,
                        includes: vec![],
                    },
                    Assertion::Existence {
                        require_po: false,
                        exists: true,
                        includes: vec![alloc(&[&[0, 2, 4], &[1, 3]], 5)],
                    },
                    Assertion::Dominated {
                        dominator: alloc(&[&[0, 2, 3], &[1, 4]], 5),
                        dominated: alloc(&[&[0, 2, 4], &[1, 3]], 5),
                    },
                    Assertion::Solve {
                        algorithm: Algorithm::HalfEfx,
                        normalize: false,
                        one_of: vec![],
                        flags: vec![(Flag::CEfx(rational::half()), true)],
                    },
                ],
            }
        }
        "sec6-left" => Fixture {
            id: "sec6-left",
            title: "EF1 without 1/2-EFX",
            instance: additive(&[&[3, 1, 0], &[3, 0, 1]], &["a", "b", "c"]),
            assertions: vec![Assertion::Check {
                allocation: alloc(&[&[0, 1], &[2]], 3),
                flags: vec![(Flag::Ef1, true), (Flag::CEfx(rational::half()), false)],
                efx_witness: None,
            }],
        },
        "sec6-right" => Fixture {
            id: "sec6-right",
            title: "1/2-EFX without EF1",
            instance: additive(&[&[1, 1, 1, 1], &[1, 1, 1, 1]], &["a", "b", "c", "d"]),
            assertions: vec![Assertion::Check {
                allocation: alloc(&[&[0, 1, 2], &[3]], 4),
                flags: vec![(Flag::Ef1, false), (Flag::CEfx(rational::half()), true)],
                efx_witness: None,
            }],
        },
        _ => return None,
    };
    f.instance.metadata = Some(format!("{}: {}", f.id, f.title));
    Some(f)
}

pub fn all_fixtures() -> Vec<Fixture> {
    FIXTURE_IDS.iter().map(|id| fixture(id).expect("known id")).collect()
}

/// Renders an allocation with the instance's good names, e.g. `({a,b},{c})`.
pub fn show_allocation(inst: &Instance, a: &Allocation) -> String {
    let bundles: Vec<String> = a
        .bundles()
        .iter()
        .map(|b| {
            format!(
                "{{{}}}",
                b.iter().map(|g| inst.good_name(g)).collect::<Vec<_>>().join(",")
            )
        })
        .collect();
    format!("({})", bundles.join(","))
}

fn flag_mismatches(r: &FairnessReport, flags: &[(Flag, bool)]) -> Vec<String> {
    flags
        .iter()
        .filter_map(|(f, want)| match f.read(r) {
            Some(got) if got == *want => None,
            got => Some(format!("{} = {got:?}, expected {want}", f.label())),
        })
        .collect()
}

fn c_values(flags: &[(Flag, bool)]) -> Vec<Rational> {
    flags
        .iter()
        .filter_map(|(f, _)| match f {
            Flag::CEfx(c) => Some(c.clone()),
            _ => None,
        })
        .collect()
}

fn wants_pareto(flags: &[(Flag, bool)]) -> bool {
    flags.iter().any(|(f, _)| *f == Flag::ParetoOptimal)
}

fn evaluate(fx: &Fixture, a: &Assertion, cfg: &SearchConfig) -> Result<(bool, String)> {
    let inst = &fx.instance;
    let vals = &inst.valuations;
    let show = |x: &Allocation| show_allocation(inst, x);
    match a {
        Assertion::Solve {
            algorithm,
            normalize,
            one_of,
            flags,
        } => {
            let out = run_algorithm(*algorithm, vals, *normalize, cfg)?.allocation;
            let r = fairness_report(&out, vals, &c_values(flags), wants_pareto(flags), cfg)?;
            let mut problems = flag_mismatches(&r, flags);
            if !one_of.is_empty() && !one_of.contains(&out) {
                problems.push("allocation not among the expected ones".into());
            }
            Ok((
                problems.is_empty(),
                format!("got {} {}", show(&out), problems.join("; "))
                    .trim_end()
                    .to_string(),
            ))
        }
        Assertion::Check {
            allocation,
            flags,
            efx_witness,
        } => {
            let r = fairness_report(allocation, vals, &c_values(flags), wants_pareto(flags), cfg)?;
            let mut problems = flag_mismatches(&r, flags);
            if let Some(w) = efx_witness {
                if r.witnesses.efx.as_ref() != Some(w) {
                    problems.push(format!("efx witness {:?}, expected {w:?}", r.witnesses.efx));
                }
            }
            Ok((problems.is_empty(), problems.join("; ")))
        }
        Assertion::Existence {
            require_po,
            exists,
            includes,
        } => {
            let r = efx_existence_report(vals, *require_po, cfg)?;
            let missing: Vec<String> = includes.iter().filter(|x| !r.witnesses.contains(x)).map(show).collect();
            let ok = r.exists == *exists && missing.is_empty();
            let mut detail = format!("{} of {} allocations qualify", r.witnesses.len(), r.examined);
            if !missing.is_empty() {
                detail += &format!("; missing {}", missing.join(", "));
            }
            Ok((ok, detail))
        }
        Assertion::Dominated { dominator, dominated } => {
            let direct = dominates(dominator, dominated, vals)?;
            let scan = pareto_dominator(dominated, vals, cfg)?;
            let detail = match &scan {
                Some(d) => format!("PO scan found {}", show(d)),
                None => "PO scan found no dominator".into(),
            };
            Ok((direct && scan.is_some(), detail))
        }
        Assertion::Differ { first, second } => {
            let x = run_algorithm(*first, vals, false, cfg)?.allocation;
            let y = run_algorithm(*second, vals, false, cfg)?.allocation;
            Ok((x != y, format!("{first} {} vs {second} {}", show(&x), show(&y))))
        }
    }
}

/// Runs every assertion of one fixture; errors count as failures.
pub fn run_fixture(fx: &Fixture, cfg: &SearchConfig) -> Vec<AssertionOutcome> {
    let show = |x: &Allocation| show_allocation(&fx.instance, x);
    fx.assertions
        .iter()
        .map(|a| {
            let (passed, detail) = evaluate(fx, a, cfg).unwrap_or_else(|e| (false, e.to_string()));
            AssertionOutcome {
                fixture: fx.id.to_string(),
                assertion: a.describe(&show),
                passed,
                detail,
            }
        })
        .collect()
}
