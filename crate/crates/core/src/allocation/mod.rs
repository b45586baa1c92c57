//! Allocations of goods to players, their canonical enumeration, envy
//! graphs and the exact fairness predicates.

mod enumerate;
mod envy;
mod fairness;

use std::borrow::Cow;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::goods::{Good, GoodSet};
use crate::rational::Rational;
use crate::valuation::ValueOracle;

pub use enumerate::{
    allocation_count, decode_allocation, enumerate_allocations, AllocationIter, SearchConfig, DEFAULT_MAX_STATES,
};
pub(crate) use enumerate::{check_capacity, scan_chunks, Odometer};
pub(crate) use envy::EnvyState;
pub use envy::{eliminate_envy_cycles, envy_graph, find_unenvied_player, EnvyGraph};
pub use fairness::{
    dominates, efx_existence_report, fairness_report, pareto_dominator, EnvyWitness, ExistenceReport, FairnessReport,
    FairnessWitnesses,
};

/// Bundles `A_1..A_n` over the goods `0..m`, pairwise disjoint.
///
/// Complete when every good is in some bundle; otherwise partial.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Allocation {
    bundles: Vec<GoodSet>,
    m: usize,
}

impl Allocation {
    pub fn new(bundles: Vec<GoodSet>, m: usize) -> Result<Self> {
        let mut seen = GoodSet::empty(m);
        for (i, b) in bundles.iter().enumerate() {
            if b.universe() != m {
                return Err(Error::usage(format!(
                    "bundle {i} is over {} goods, expected {m}",
                    b.universe()
                )));
            }
            if !b.is_disjoint(&seen) {
                let g = b.intersection(&seen).iter().next().expect("non-empty overlap");
                return Err(Error::usage(format!("good {g} appears in more than one bundle")));
            }
            seen = seen.union(b);
        }
        Ok(Allocation { bundles, m })
    }

    /// Bundles given as lists of good indices.
    pub fn from_goods(bundles: &[&[Good]], m: usize) -> Result<Self> {
        let sets = bundles
            .iter()
            .map(|b| GoodSet::from_goods(b.iter().copied(), m))
            .collect::<Result<Vec<_>>>()?;
        Self::new(sets, m)
    }

    /// `n` empty bundles.
    pub fn empty(n: usize, m: usize) -> Self {
        Allocation {
            bundles: vec![GoodSet::empty(m); n],
            m,
        }
    }

    pub(crate) fn from_masks(masks: &[u128], m: usize) -> Self {
        let bundles = masks
            .iter()
            .map(|&mask| GoodSet::from_mask(mask, m).expect("mask within universe"))
            .collect();
        Allocation { bundles, m }
    }

    pub fn players(&self) -> usize {
        self.bundles.len()
    }

    pub fn goods(&self) -> usize {
        self.m
    }

    pub fn bundles(&self) -> &[GoodSet] {
        &self.bundles
    }

    pub fn bundle(&self, player: usize) -> &GoodSet {
        &self.bundles[player]
    }

    pub fn allocated(&self) -> GoodSet {
        self.bundles.iter().fold(GoodSet::empty(self.m), |acc, b| acc.union(b))
    }

    pub fn is_complete(&self) -> bool {
        self.allocated() == GoodSet::full(self.m)
    }

    pub fn owner(&self, g: Good) -> Option<usize> {
        self.bundles.iter().position(|b| b.contains(g))
    }

    /// Position in the canonical enumeration: the base-`n` numeral whose
    /// digit `g` is the owner of good `g`. `None` for partial allocations.
    pub fn canonical_index(&self) -> Option<u128> {
        let n = self.players() as u128;
        let mut index = 0u128;
        for g in (0..self.m).rev() {
            index = index.checked_mul(n)?.checked_add(self.owner(g)? as u128)?;
        }
        Some(index)
    }

    /// Swaps bundles so that player `i` receives `bundles[perm[i]]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Allocation> {
        let mut sorted = perm.to_vec();
        sorted.sort_unstable();
        if sorted != (0..self.players()).collect::<Vec<_>>() {
            return Err(Error::usage("not a permutation of the players"));
        }
        Ok(Allocation {
            bundles: perm.iter().map(|&k| self.bundles[k]).collect(),
            m: self.m,
        })
    }

    /// `(v_1(A_1), ..., v_n(A_n))`.
    pub fn utilities<V: ValueOracle>(&self, valuations: &[V]) -> Result<Vec<Rational>> {
        check_instance(self, valuations)?;
        Ok(self.bundles.iter().zip(valuations).map(|(b, v)| v.eval(*b)).collect())
    }

    pub fn to_goods(&self) -> Vec<Vec<Good>> {
        self.bundles.iter().map(GoodSet::to_vec).collect()
    }
}

impl fmt::Debug for Allocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Allocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, b) in self.bundles.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, ")")
    }
}

/// Wire form: `{"bundles":[[0,2],[1]]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AllocationDoc {
    pub bundles: Vec<Vec<Good>>,
}

impl AllocationDoc {
    pub fn into_allocation(self, m: usize) -> Result<Allocation> {
        let mut sets = Vec::with_capacity(self.bundles.len());
        for (i, goods) in self.bundles.iter().enumerate() {
            let mut set = GoodSet::empty(m);
            for (k, &g) in goods.iter().enumerate() {
                if g >= m {
                    return Err(Error::schema(
                        format!("/bundles/{i}/{k}"),
                        format!("unknown good index {g} (instance has {m} goods)"),
                    ));
                }
                if set.contains(g) {
                    return Err(Error::schema(format!("/bundles/{i}/{k}"), format!("good {g} repeated")));
                }
                set = set.with(g);
            }
            sets.push(set);
        }
        Allocation::new(sets, m)
    }
}

impl From<&Allocation> for AllocationDoc {
    fn from(a: &Allocation) -> Self {
        AllocationDoc { bundles: a.to_goods() }
    }
}

impl Serialize for Allocation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        AllocationDoc::from(self).serialize(s)
    }
}

pub(crate) fn check_instance<V: ValueOracle>(a: &Allocation, valuations: &[V]) -> Result<()> {
    if a.players() != valuations.len() {
        return Err(Error::usage(format!(
            "allocation has {} bundles but there are {} valuations",
            a.players(),
            valuations.len()
        )));
    }
    check_universe(a.goods(), valuations)
}

pub(crate) fn check_universe<V: ValueOracle>(m: usize, valuations: &[V]) -> Result<()> {
    if let Some(i) = valuations.iter().position(|v| v.goods() != m) {
        return Err(Error::usage(format!(
            "valuation {i} is over {} goods, expected {m}",
            valuations[i].goods()
        )));
    }
    Ok(())
}

/// Per-player values of every bundle mask, tabulated when the universe is small.
pub(crate) enum Utilities<'a, V> {
    Dense(Vec<Vec<Rational>>),
    Direct {
        valuations: &'a [V],
        scale: Option<Vec<Rational>>,
    },
}

/// Universes up to this size get a dense table of `n · 2^m` values.
pub(crate) const DENSE_MAX_GOODS: usize = 16;

impl<'a, V: ValueOracle> Utilities<'a, V> {
    /// When `normalize` is set every `v_i` is divided by `v_i(M)`.
    pub(crate) fn build(valuations: &'a [V], m: usize, normalize: bool) -> Result<Self> {
        let scale = if normalize {
            let full = GoodSet::full(m);
            let mut totals = Vec::with_capacity(valuations.len());
            for (i, v) in valuations.iter().enumerate() {
                let t = v.eval(full);
                if t.is_zero() {
                    return Err(Error::Precondition(format!(
                        "player {i} values the whole set of goods at 0, cannot normalize"
                    )));
                }
                totals.push(t);
            }
            Some(totals)
        } else {
            None
        };
        if m <= DENSE_MAX_GOODS {
            let table = valuations
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    (0..1u128 << m)
                        .map(|mask| {
                            let x = v.eval(GoodSet::from_mask(mask, m).expect("in universe"));
                            match &scale {
                                Some(t) => x / &t[i],
                                None => x,
                            }
                        })
                        .collect()
                })
                .collect();
            Ok(Utilities::Dense(table))
        } else {
            Ok(Utilities::Direct { valuations, scale })
        }
    }

    #[inline]
    pub(crate) fn get(&self, player: usize, mask: u128, m: usize) -> Cow<'_, Rational> {
        match self {
            Utilities::Dense(t) => Cow::Borrowed(&t[player][mask as usize]),
            Utilities::Direct { valuations, scale } => {
                let x = valuations[player].eval(GoodSet::from_mask(mask, m).expect("in universe"));
                Cow::Owned(match scale {
                    Some(t) => x / &t[player],
                    None => x,
                })
            }
        }
    }
}
