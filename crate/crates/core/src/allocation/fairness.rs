//! Exact envy-freeness, EF1, EFX, c-EFX and Pareto-optimality checks.

use std::ops::Range;

use num_traits::{One, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use super::{
    check_capacity, check_instance, check_universe, scan_chunks, Allocation, Odometer, SearchConfig, Utilities,
};
use crate::error::{Error, Result};
use crate::goods::{Good, GoodSet};
use crate::rational::{self, Rational};
use crate::valuation::ValueOracle;

/// Player `envious` prefers (part of) the bundle of `envied`. For EFX and
/// c-EFX, `good` is the removed good that fails to eliminate the envy.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnvyWitness {
    pub envious: usize,
    pub envied: usize,
    pub good: Option<Good>,
}

/// One witness per false flag.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FairnessWitnesses {
    pub envy_free: Option<EnvyWitness>,
    pub ef1: Option<EnvyWitness>,
    pub efx: Option<EnvyWitness>,
    pub c_efx: Vec<(Rational, EnvyWitness)>,
    /// Lowest-index complete allocation that Pareto-dominates the input.
    pub pareto_optimal: Option<Allocation>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FairnessReport {
    pub envy_free: bool,
    pub ef1: bool,
    pub efx: bool,
    /// In the order requested.
    pub c_efx: Vec<(Rational, bool)>,
    /// `None` when not requested.
    pub pareto_optimal: Option<bool>,
    pub witnesses: FairnessWitnesses,
}

impl FairnessReport {
    pub fn c_efx(&self, c: &Rational) -> Option<bool> {
        self.c_efx.iter().find(|(x, _)| x == c).map(|(_, b)| *b)
    }
}

struct RationalKeyed<'a, T>(&'a [(Rational, T)]);

impl<T: Serialize> Serialize for RationalKeyed<'_, T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (c, v) in self.0 {
            map.serialize_entry(&rational::format(c), v)?;
        }
        map.end()
    }
}

impl Serialize for FairnessWitnesses {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(None)?;
        map.serialize_entry("envy_free", &self.envy_free)?;
        map.serialize_entry("ef1", &self.ef1)?;
        map.serialize_entry("efx", &self.efx)?;
        map.serialize_entry("c_efx", &RationalKeyed(&self.c_efx))?;
        map.serialize_entry("pareto_optimal", &self.pareto_optimal)?;
        map.end()
    }
}

impl Serialize for FairnessReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(None)?;
        map.serialize_entry("envy_free", &self.envy_free)?;
        map.serialize_entry("ef1", &self.ef1)?;
        map.serialize_entry("efx", &self.efx)?;
        map.serialize_entry("c_efx", &RationalKeyed(&self.c_efx))?;
        map.serialize_entry("pareto_optimal", &self.pareto_optimal)?;
        map.serialize_entry("witnesses", &self.witnesses)?;
        map.end()
    }
}

/// Values `v_i(A_i)`, `v_i(A_j)` and `v_i(A_j \ g)` for every `i != j`, `g ∈ A_j`.
struct Views {
    own: Vec<Rational>,
    other: Vec<Vec<Rational>>,
    /// `(i, j, g, v_i(A_j \ g))`, ordered by `i`, then `j`, then `g`.
    removals: Vec<(usize, usize, Good, Rational)>,
}

impl Views {
    fn new<V: ValueOracle>(a: &Allocation, valuations: &[V]) -> Self {
        let n = a.players();
        let mut own = Vec::with_capacity(n);
        let mut other = Vec::with_capacity(n);
        let mut removals = Vec::new();
        for (i, v) in valuations.iter().enumerate() {
            own.push(v.eval(*a.bundle(i)));
            other.push((0..n).map(|j| v.eval(*a.bundle(j))).collect());
            for j in (0..n).filter(|&j| j != i) {
                let bj = a.bundle(j);
                for g in bj.iter() {
                    removals.push((i, j, g, v.eval(bj.without(g))));
                }
            }
        }
        Views { own, other, removals }
    }

    fn envy_free(&self) -> Option<EnvyWitness> {
        let n = self.own.len();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .find(|&(i, j)| i != j && self.own[i] < self.other[i][j])
            .map(|(i, j)| EnvyWitness {
                envious: i,
                envied: j,
                good: None,
            })
    }

    /// Violated only when `i` envies `j` and no single removal cures it.
    fn ef1(&self) -> Option<EnvyWitness> {
        let n = self.own.len();
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                if self.own[i] >= self.other[i][j] {
                    continue;
                }
                let cured = self
                    .removals
                    .iter()
                    .any(|(x, y, _, w)| *x == i && *y == j && self.own[i] >= *w);
                if !cured {
                    return Some(EnvyWitness {
                        envious: i,
                        envied: j,
                        good: None,
                    });
                }
            }
        }
        None
    }

    /// First `(i, j, g)` with `v_i(A_i) < c · v_i(A_j \ g)`.
    fn c_efx(&self, c: &Rational) -> Option<EnvyWitness> {
        let exact = c.is_one();
        self.removals
            .iter()
            .find(|(i, _, _, w)| if exact { self.own[*i] < *w } else { self.own[*i] < c * w })
            .map(|&(i, j, g, _)| EnvyWitness {
                envious: i,
                envied: j,
                good: Some(g),
            })
    }
}

/// Evaluates every fairness flag of `a` exactly.
///
/// `c_values` must lie in `[0, 1]`. Pareto optimality is decided over all
/// complete allocations and is only computed when `include_pareto` is set.
pub fn fairness_report<V: ValueOracle>(
    a: &Allocation,
    valuations: &[V],
    c_values: &[Rational],
    include_pareto: bool,
    cfg: &SearchConfig,
) -> Result<FairnessReport> {
    check_instance(a, valuations)?;
    if let Some(c) = c_values.iter().find(|c| c.is_negative_or_above_one()) {
        return Err(Error::usage(format!(
            "c must lie in [0, 1], got {}",
            rational::format(c)
        )));
    }
    let views = Views::new(a, valuations);
    let mut witnesses = FairnessWitnesses {
        envy_free: views.envy_free(),
        ef1: views.ef1(),
        efx: views.c_efx(&Rational::one()),
        ..Default::default()
    };
    let mut c_efx = Vec::with_capacity(c_values.len());
    for c in c_values {
        let w = views.c_efx(c);
        c_efx.push((c.clone(), w.is_none()));
        if let Some(w) = w {
            witnesses.c_efx.push((c.clone(), w));
        }
    }
    let pareto_optimal = if include_pareto {
        witnesses.pareto_optimal = pareto_dominator(a, valuations, cfg)?;
        Some(witnesses.pareto_optimal.is_none())
    } else {
        None
    };
    Ok(FairnessReport {
        envy_free: witnesses.envy_free.is_none(),
        ef1: witnesses.ef1.is_none(),
        efx: witnesses.efx.is_none(),
        c_efx,
        pareto_optimal,
        witnesses,
    })
}

trait UnitInterval {
    fn is_negative_or_above_one(&self) -> bool;
}

impl UnitInterval for Rational {
    fn is_negative_or_above_one(&self) -> bool {
        *self < Rational::zero() || *self > Rational::one()
    }
}

/// Everyone weakly better off in `b` than in `a`, someone strictly.
pub fn dominates<V: ValueOracle>(b: &Allocation, a: &Allocation, valuations: &[V]) -> Result<bool> {
    let ub = b.utilities(valuations)?;
    let ua = a.utilities(valuations)?;
    Ok(vector_dominates(&ub, &ua))
}

fn vector_dominates<R: std::borrow::Borrow<Rational>>(b: &[R], a: &[Rational]) -> bool {
    let mut strict = false;
    for (x, y) in b.iter().zip(a) {
        let x = x.borrow();
        if x < y {
            return false;
        }
        strict |= x > y;
    }
    strict
}

/// Lowest-index complete allocation that Pareto-dominates `a`, if any.
pub fn pareto_dominator<V: ValueOracle>(
    a: &Allocation,
    valuations: &[V],
    cfg: &SearchConfig,
) -> Result<Option<Allocation>> {
    check_instance(a, valuations)?;
    let (n, m) = (a.players(), a.goods());
    let total = check_capacity(n, m, cfg, "Pareto-optimality check")?;
    let base = a.utilities(valuations)?;
    let utils = Utilities::build(valuations, m, false)?;
    let found = scan_chunks(total, cfg, |range| first_dominator(&utils, &base, n, m, range));
    Ok(found
        .into_iter()
        .flatten()
        .next()
        .map(|masks| Allocation::from_masks(&masks, m)))
}

fn first_dominator<V: ValueOracle>(
    utils: &Utilities<'_, V>,
    base: &[Rational],
    n: usize,
    m: usize,
    range: Range<u64>,
) -> Option<Vec<u128>> {
    let mut odo = Odometer::new(n, m, range);
    if odo.is_empty() {
        return None;
    }
    loop {
        let masks = odo.masks();
        let mut strict = false;
        let mut weak = true;
        for (i, &mask) in masks.iter().enumerate() {
            let u = utils.get(i, mask, m);
            if *u < base[i] {
                weak = false;
                break;
            }
            strict |= *u > base[i];
        }
        if weak && strict {
            return Some(masks.to_vec());
        }
        if !odo.advance() {
            return None;
        }
    }
}

/// Result of an exhaustive existence scan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExistenceReport {
    pub exists: bool,
    /// Every qualifying allocation, in canonical order.
    pub witnesses: Vec<Allocation>,
    /// Number of complete allocations classified.
    pub examined: u64,
}

/// Classifies every complete allocation as EFX or not; with `require_po`
/// keeps only those that are also Pareto optimal.
pub fn efx_existence_report<V: ValueOracle>(
    valuations: &[V],
    require_po: bool,
    cfg: &SearchConfig,
) -> Result<ExistenceReport> {
    let n = valuations.len();
    let m = valuations.first().map_or(0, |v| v.goods());
    check_universe(m, valuations)?;
    let total = check_capacity(n, m, cfg, "EFX existence scan")?;
    let utils = Utilities::build(valuations, m, false)?;

    let efx: Vec<Vec<u128>> = scan_chunks(total, cfg, |range| efx_in_range(&utils, n, m, range))
        .into_iter()
        .flatten()
        .collect();

    let witnesses: Vec<Vec<u128>> = if require_po && !efx.is_empty() {
        let frontier = pareto_frontier(&utils, n, m, total, cfg);
        efx.into_iter()
            .filter(|masks| {
                let u: Vec<Rational> = masks
                    .iter()
                    .enumerate()
                    .map(|(i, &b)| utils.get(i, b, m).into_owned())
                    .collect();
                !frontier.iter().any(|f| vector_dominates(f, &u))
            })
            .collect()
    } else {
        efx
    };
    Ok(ExistenceReport {
        exists: !witnesses.is_empty(),
        witnesses: witnesses.iter().map(|w| Allocation::from_masks(w, m)).collect(),
        examined: total,
    })
}

fn efx_in_range<V: ValueOracle>(utils: &Utilities<'_, V>, n: usize, m: usize, range: Range<u64>) -> Vec<Vec<u128>> {
    let mut out = Vec::new();
    let mut odo = Odometer::new(n, m, range);
    if odo.is_empty() {
        return out;
    }
    loop {
        if is_efx_masks(utils, odo.masks(), m) {
            out.push(odo.masks().to_vec());
        }
        if !odo.advance() {
            return out;
        }
    }
}

fn is_efx_masks<V: ValueOracle>(utils: &Utilities<'_, V>, masks: &[u128], m: usize) -> bool {
    for (i, &own) in masks.iter().enumerate() {
        let mine = utils.get(i, own, m);
        for (j, &theirs) in masks.iter().enumerate() {
            if i == j {
                continue;
            }
            let set = GoodSet::from_mask(theirs, m).expect("in universe");
            if set.iter().any(|g| *mine < *utils.get(i, theirs & !(1u128 << g), m)) {
                return false;
            }
        }
    }
    true
}

/// Maximal utility vectors over all complete allocations.
fn pareto_frontier<V: ValueOracle>(
    utils: &Utilities<'_, V>,
    n: usize,
    m: usize,
    total: u64,
    cfg: &SearchConfig,
) -> Vec<Vec<Rational>> {
    let parts = scan_chunks(total, cfg, |range| {
        let mut front = Vec::new();
        let mut odo = Odometer::new(n, m, range);
        if odo.is_empty() {
            return front;
        }
        loop {
            let u: Vec<Rational> = odo
                .masks()
                .iter()
                .enumerate()
                .map(|(i, &b)| utils.get(i, b, m).into_owned())
                .collect();
            insert_maximal(&mut front, u);
            if !odo.advance() {
                return front;
            }
        }
    });
    let mut front = Vec::new();
    for u in parts.into_iter().flatten() {
        insert_maximal(&mut front, u);
    }
    front
}

fn insert_maximal(front: &mut Vec<Vec<Rational>>, u: Vec<Rational>) {
    if front.iter().any(|f| f.iter().zip(&u).all(|(x, y)| x >= y)) {
        return;
    }
    front.retain(|f| !f.iter().zip(&u).all(|(x, y)| x <= y));
    front.push(u);
}
