//! Valuation oracles over subsets of goods.
//!
//! A valuation maps every subset of the goods to a non-negative exact
//! rational, with `v(∅) = 0` and `S ⊆ T ⇒ v(S) ≤ v(T)`. Three concrete
//! flavors exist:
//!
//! * additive: one value per good, `v(S)` is the sum over `S`;
//! * table: all `2^m` values stored explicitly;
//! * kneser: the two-player hard instance built from a score oracle on
//!   size-`k` subsets (see [`crate::kneserlab::build_reduction_valuation`]).
//!
//! Algorithms are generic over [`ValueOracle`] so that a
//! [`QueryCountedValuation`] can be dropped in wherever a plain valuation is
//! expected.

mod class;
mod counted;
mod generate;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::goods::{Good, GoodSet, MAX_GOODS};
use crate::kneserlab::ScoreOracle;
use crate::rational::{self, Rational};

pub use class::{check_class, ClassLimits, ClassReport, ClassWitness};
pub use counted::QueryCountedValuation;
pub use generate::{generate_random, GeneratorKind};

/// Default cap on the universe size of table valuations (`2^m` stored values).
pub const DEFAULT_TABLE_MAX_GOODS: usize = 20;

/// Value-query access to a valuation.
pub trait ValueOracle: Sync {
    /// Size `m` of the universe of goods.
    fn goods(&self) -> usize;

    /// `v(S)` without a universe check. Callers guarantee `S` is over `0..goods()`.
    fn eval(&self, set: GoodSet) -> Rational;

    /// Per-good values when the valuation is additive.
    fn additive_values(&self) -> Option<&[Rational]> {
        None
    }

    /// `v(S)`, rejecting sets over a different universe.
    fn value(&self, set: &GoodSet) -> Result<Rational> {
        if set.universe() != self.goods() {
            return Err(Error::usage(format!(
                "set {set} is over {} goods, valuation is over {}",
                set.universe(),
                self.goods()
            )));
        }
        Ok(self.eval(*set))
    }
}

impl<V: ValueOracle + ?Sized> ValueOracle for &V {
    fn goods(&self) -> usize {
        (**self).goods()
    }
    fn eval(&self, set: GoodSet) -> Rational {
        (**self).eval(set)
    }
    fn additive_values(&self) -> Option<&[Rational]> {
        (**self).additive_values()
    }
}

#[derive(Clone)]
pub enum ValuationKind {
    Additive(Vec<Rational>),
    /// `entries[mask]` is the value of the set with that mask.
    Table(Vec<Rational>),
    Kneser {
        k: usize,
        oracle: Arc<ScoreOracle>,
    },
}

/// An immutable valuation over the goods `0..m`.
#[derive(Clone)]
pub struct Valuation {
    kind: ValuationKind,
    m: usize,
}

impl Valuation {
    /// Additive valuation from per-good values; rejects negative values.
    pub fn additive(values: Vec<Rational>) -> Result<Self> {
        if values.len() > MAX_GOODS {
            return Err(Error::usage(format!("{} goods exceeds {MAX_GOODS}", values.len())));
        }
        if let Some(g) = values.iter().position(|v| v.is_negative()) {
            return Err(Error::usage(format!("good {g} has a negative value")));
        }
        Ok(Valuation {
            m: values.len(),
            kind: ValuationKind::Additive(values),
        })
    }

    /// Additive valuation from integer per-good values.
    pub fn additive_ints(values: &[i64]) -> Result<Self> {
        Self::additive(values.iter().map(|&v| rational::int(v)).collect())
    }

    /// Table valuation with the default size cap and monotonicity enforced.
    pub fn table(m: usize, entries: Vec<Rational>) -> Result<Self> {
        Self::table_with(m, entries, true, DEFAULT_TABLE_MAX_GOODS)
    }

    /// Table valuation.
    ///
    /// `entries` must hold exactly `2^m` non-negative values with `entries[0] = 0`.
    /// When `enforce_monotone` is set every single-good extension is checked.
    pub fn table_with(m: usize, entries: Vec<Rational>, enforce_monotone: bool, max_goods: usize) -> Result<Self> {
        if m > max_goods || m >= MAX_GOODS {
            return Err(Error::Capacity {
                what: "table valuation".into(),
                needed: 1u128 << m.min(127),
                limit: 1u128 << max_goods.min(127),
            });
        }
        if entries.len() != 1usize << m {
            return Err(Error::usage(format!(
                "table over {m} goods needs {} entries, got {}",
                1usize << m,
                entries.len()
            )));
        }
        if !entries[0].is_zero() {
            return Err(Error::usage("table valuation must satisfy v(∅) = 0"));
        }
        if let Some(mask) = entries.iter().position(|v| v.is_negative()) {
            return Err(Error::usage(format!("table entry {mask} is negative")));
        }
        if enforce_monotone {
            for (mask, value) in entries.iter().enumerate() {
                for g in 0..m {
                    let up = mask | 1 << g;
                    if up != mask && entries[up] < *value {
                        return Err(Error::usage(format!(
                            "table is not monotone: v({}) > v({})",
                            mask_text(mask as u128),
                            mask_text(up as u128)
                        )));
                    }
                }
            }
        }
        Ok(Valuation {
            m,
            kind: ValuationKind::Table(entries),
        })
    }

    /// Tabulates an arbitrary set function.
    pub fn table_from_fn<F: FnMut(GoodSet) -> Rational>(m: usize, mut f: F) -> Result<Self> {
        if m > DEFAULT_TABLE_MAX_GOODS {
            return Self::table(m, Vec::new());
        }
        let entries = (0..1u128 << m)
            .map(|mask| f(GoodSet::from_mask(mask, m).expect("mask within universe")))
            .collect();
        Self::table(m, entries)
    }

    /// The reduction valuation over `2k + 1` goods backed by a score oracle.
    pub fn kneser(k: usize, oracle: Arc<ScoreOracle>) -> Result<Self> {
        if oracle.n() != 2 * k + 1 || oracle.k() != k {
            return Err(Error::usage(format!(
                "score oracle is over K({}, {}), reduction needs K({}, {k})",
                oracle.n(),
                oracle.k(),
                2 * k + 1
            )));
        }
        Ok(Valuation {
            m: 2 * k + 1,
            kind: ValuationKind::Kneser { k, oracle },
        })
    }

    pub fn kind(&self) -> &ValuationKind {
        &self.kind
    }

    /// Materializes every value into a table valuation (no monotonicity check).
    pub fn to_table(&self) -> Result<Valuation> {
        if self.m > DEFAULT_TABLE_MAX_GOODS {
            return Err(Error::Capacity {
                what: "table valuation".into(),
                needed: 1u128 << self.m,
                limit: 1u128 << DEFAULT_TABLE_MAX_GOODS,
            });
        }
        let entries = (0..1u128 << self.m)
            .map(|mask| self.eval(GoodSet::from_mask(mask, self.m).expect("in universe")))
            .collect();
        Ok(Valuation {
            m: self.m,
            kind: ValuationKind::Table(entries),
        })
    }

    /// `λ · v` for a positive rational `λ`.
    pub fn scaled(&self, factor: &Rational) -> Result<Valuation> {
        if !factor.is_positive() {
            return Err(Error::usage("scaling factor must be positive"));
        }
        match &self.kind {
            ValuationKind::Additive(vals) => Valuation::additive(vals.iter().map(|v| v * factor).collect()),
            ValuationKind::Table(entries) => Ok(Valuation {
                m: self.m,
                kind: ValuationKind::Table(entries.iter().map(|v| v * factor).collect()),
            }),
            ValuationKind::Kneser { .. } => {
                let t = self.to_table()?;
                t.scaled(factor)
            }
        }
    }
}

/// `v(S ∪ {g}) − v(S)`. Errors when `g ∈ S` or `g` is outside the universe.
pub fn marginal<V: ValueOracle + ?Sized>(v: &V, set: &GoodSet, g: Good) -> Result<Rational> {
    if set.universe() != v.goods() {
        return Err(Error::usage("set and valuation have different universes"));
    }
    if g >= v.goods() {
        return Err(Error::usage(format!("good {g} outside 0..{}", v.goods())));
    }
    if set.contains(g) {
        return Err(Error::usage(format!("good {g} already in {set}")));
    }
    Ok(v.eval(set.with(g)) - v.eval(*set))
}

fn mask_text(mask: u128) -> String {
    let goods: Vec<String> = (0..128).filter(|g| mask >> g & 1 == 1).map(|g| g.to_string()).collect();
    format!("{{{}}}", goods.join(","))
}

impl ValueOracle for Valuation {
    fn goods(&self) -> usize {
        self.m
    }

    fn eval(&self, set: GoodSet) -> Rational {
        debug_assert_eq!(set.universe(), self.m);
        match &self.kind {
            ValuationKind::Additive(vals) => set.iter().fold(Rational::zero(), |acc, g| acc + &vals[g]),
            ValuationKind::Table(entries) => entries[set.mask() as usize].clone(),
            ValuationKind::Kneser { k, oracle } => {
                let k = *k;
                let size = set.len();
                let two = |x: usize| Rational::from_integer(BigInt::from(2 * x));
                if size < k {
                    two(size)
                } else if size > k {
                    two(k)
                } else {
                    two(k) + crate::kneserlab::delta(oracle.query_mask(set.mask()))
                }
            }
        }
    }

    fn additive_values(&self) -> Option<&[Rational]> {
        match &self.kind {
            ValuationKind::Additive(vals) => Some(vals),
            _ => None,
        }
    }
}

impl PartialEq for Valuation {
    fn eq(&self, other: &Self) -> bool {
        if self.m != other.m {
            return false;
        }
        match (&self.kind, &other.kind) {
            (ValuationKind::Additive(a), ValuationKind::Additive(b)) => a == b,
            (ValuationKind::Table(a), ValuationKind::Table(b)) => a == b,
            (ValuationKind::Kneser { k: ka, oracle: oa }, ValuationKind::Kneser { k: kb, oracle: ob }) => {
                ka == kb && Arc::ptr_eq(oa, ob)
            }
            _ => false,
        }
    }
}

impl fmt::Debug for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fmt_vals = |vals: &[Rational]| -> Vec<String> { vals.iter().map(rational::format).collect() };
        match &self.kind {
            ValuationKind::Additive(vals) => write!(f, "Additive{:?}", fmt_vals(vals)),
            ValuationKind::Table(entries) => write!(f, "Table(m={}, {:?})", self.m, fmt_vals(entries)),
            ValuationKind::Kneser { k, .. } => write!(f, "Kneser(k={k})"),
        }
    }
}

/// True iff every valuation in the slice equals the first.
pub fn all_identical(valuations: &[Valuation]) -> bool {
    valuations.windows(2).all(|w| w[0] == w[1])
}
