//! Leximin and leximin++ orderings and their exhaustive maximizers.
//!
//! Allocations are compared through their profile: the players sorted by
//! increasing utility (ties by player index), each paired with the size of
//! that player's bundle. Plain leximin compares the utilities position by
//! position; leximin++ additionally compares bundle sizes at each position,
//! right after the utilities.

use std::cmp::Ordering;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::allocation::{
    check_capacity, check_instance, check_universe, scan_chunks, Allocation, Odometer, SearchConfig, Utilities,
};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::valuation::ValueOracle;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComparatorKind {
    Leximin,
    LeximinPlusPlus,
}

/// Players by increasing utility, ties broken by ascending index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlayerOrdering {
    players: Vec<usize>,
}

impl PlayerOrdering {
    pub fn new(utilities: &[Rational]) -> Self {
        let mut players: Vec<usize> = (0..utilities.len()).collect();
        players.sort_by(|&i, &j| utilities[i].cmp(&utilities[j]).then(i.cmp(&j)));
        PlayerOrdering { players }
    }

    pub fn players(&self) -> &[usize] {
        &self.players
    }
}

/// `(utility, bundle size)` along a [`PlayerOrdering`].
type Profile = Vec<(Rational, u32)>;

fn profile(utilities: Vec<Rational>, sizes: &[u32]) -> Profile {
    let order = PlayerOrdering::new(&utilities);
    let mut slots: Vec<Option<Rational>> = utilities.into_iter().map(Some).collect();
    order
        .players
        .iter()
        .map(|&i| (slots[i].take().expect("each player once"), sizes[i]))
        .collect()
}

/// `a ≺ b`.
fn precedes(a: &[(Rational, u32)], b: &[(Rational, u32)], kind: ComparatorKind) -> bool {
    for ((ua, sa), (ub, sb)) in a.iter().zip(b) {
        match ua.cmp(ub) {
            Ordering::Less => return true,
            Ordering::Greater => return false,
            Ordering::Equal => {}
        }
        if kind == ComparatorKind::LeximinPlusPlus && sa != sb {
            return sa < sb;
        }
    }
    false
}

/// True iff `a` strictly precedes `b` under `kind`.
pub fn leximin_cmp<V: ValueOracle>(
    a: &Allocation,
    b: &Allocation,
    valuations: &[V],
    kind: ComparatorKind,
) -> Result<bool> {
    check_instance(a, valuations)?;
    check_instance(b, valuations)?;
    if a.goods() != b.goods() {
        return Err(Error::usage("allocations are over different universes"));
    }
    let sizes = |x: &Allocation| x.bundles().iter().map(|s| s.len() as u32).collect::<Vec<_>>();
    let pa = profile(a.utilities(valuations)?, &sizes(a));
    let pb = profile(b.utilities(valuations)?, &sizes(b));
    Ok(precedes(&pa, &pb, kind))
}

/// The earliest complete allocation (in canonical order) that no other
/// complete allocation strictly follows. With `normalize`, each `v_i` is
/// divided by `v_i(M)` first.
pub fn solve<V: ValueOracle>(
    valuations: &[V],
    kind: ComparatorKind,
    normalize: bool,
    cfg: &SearchConfig,
) -> Result<Allocation> {
    let n = valuations.len();
    let m = valuations.first().map_or(0, |v| v.goods());
    check_universe(m, valuations)?;
    let total = check_capacity(n, m, cfg, "leximin search")?;
    let utils = Utilities::build(valuations, m, normalize)?;
    let bests = scan_chunks(total, cfg, |range| best_in_range(&utils, n, m, kind, range));
    let mut best: Option<(Vec<u128>, Profile)> = None;
    for candidate in bests.into_iter().flatten() {
        if best.as_ref().is_none_or(|(_, p)| precedes(p, &candidate.1, kind)) {
            best = Some(candidate);
        }
    }
    let (masks, _) = best.ok_or_else(|| Error::Invariant("empty allocation space".into()))?;
    Ok(Allocation::from_masks(&masks, m))
}

fn best_in_range<V: ValueOracle>(
    utils: &Utilities<'_, V>,
    n: usize,
    m: usize,
    kind: ComparatorKind,
    range: Range<u64>,
) -> Option<(Vec<u128>, Profile)> {
    let mut odo = Odometer::new(n, m, range);
    if odo.is_empty() {
        return None;
    }
    let mut sizes = vec![0u32; n];
    let mut best: Option<(Vec<u128>, Profile)> = None;
    loop {
        let masks = odo.masks();
        let utilities: Vec<Rational> = masks
            .iter()
            .enumerate()
            .map(|(i, &b)| utils.get(i, b, m).into_owned())
            .collect();
        for (s, b) in sizes.iter_mut().zip(masks) {
            *s = b.count_ones();
        }
        let p = profile(utilities, &sizes);
        if best.as_ref().is_none_or(|(_, q)| precedes(q, &p, kind)) {
            best = Some((masks.to_vec(), p));
        }
        if !odo.advance() {
            return best;
        }
    }
}
