use serde::Serialize;

use crate::allocation::{check_universe, Allocation, EnvyState};
use crate::error::{Error, Result};
use crate::goods::{Good, GoodSet};
use crate::rational::{self, Rational};
use crate::valuation::ValueOracle;

/// One pass of the pool loop.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HalfEfxRound {
    pub round: u64,
    pub good: Good,
    pub recipient: usize,
    /// Player whose bundle went back to the pool and who kept only `good`.
    pub reassigned: Option<usize>,
    /// Envy cycles rotated at the end of the round.
    pub rotations: Vec<Vec<usize>>,
    /// Pool after the round.
    pub pool: Vec<Good>,
    /// Allocation after cycle elimination.
    pub snapshot: Allocation,
    /// `Σ_k v_k(A_k)` after the round.
    #[serde(with = "rational::as_string")]
    pub potential: Rational,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct HalfEfxTrace {
    pub rounds: Vec<HalfEfxRound>,
    pub round_count: u64,
    /// `m (n + 1)^m`, saturating.
    pub round_limit: u128,
}

/// Envy-cycle procedure returning a 1/2-EFX allocation for subadditive
/// valuations.
///
/// The pool is drained lowest good first; each good goes to the
/// lowest-index unenvied player `j`. If some player `i` now has
/// `v_i(A_i) < ½ v_i(A_j ∖ g)` (first `i`, then first `g`), `i`'s bundle
/// returns to the pool and `i` keeps only the new good. Subadditivity is
/// not checked here; exceeding the round limit is reported as an invariant
/// violation.
pub fn half_efx<V: ValueOracle>(valuations: &[V]) -> Result<(Allocation, HalfEfxTrace)> {
    let n = valuations.len();
    if n == 0 {
        return Err(Error::usage("at least one player is required"));
    }
    let m = valuations[0].goods();
    check_universe(m, valuations)?;
    let round_limit = (m as u128).saturating_mul((n as u128 + 1).saturating_pow(m as u32));
    let mut state = EnvyState::new(&Allocation::empty(n, m), valuations);
    let mut pool = GoodSet::full(m);
    let mut trace = HalfEfxTrace {
        round_limit,
        ..Default::default()
    };
    let half = rational::half();

    while let Some(good) = pool.iter().next() {
        trace.round_count += 1;
        if u128::from(trace.round_count) > round_limit {
            return Err(Error::Invariant(format!("no termination within {round_limit} rounds")));
        }
        pool = pool.without(good);
        let j = state
            .unenvied()
            .ok_or_else(|| Error::Invariant("no unenvied player after cycle elimination".into()))?;
        let grown = state.bundle(j).with(good);
        state.set_bundle(j, grown, valuations);

        let violator = (0..n).filter(|&i| i != j).find_map(|i| {
            let own = state.worth(i, i);
            grown
                .iter()
                .find(|&g| *own < &half * valuations[i].eval(grown.without(g)))
                .map(|_| i)
        });
        if let Some(i) = violator {
            pool = pool.union(state.bundle(i));
            state.set_bundle(j, grown.without(good), valuations);
            state.set_bundle(i, GoodSet::singleton(good, m).expect("good in universe"), valuations);
        }
        let rotations = state.eliminate_cycles()?;
        let potential = (0..n).fold(Rational::default(), |acc, k| acc + state.worth(k, k));
        trace.rounds.push(HalfEfxRound {
            round: trace.round_count,
            good,
            recipient: j,
            reassigned: violator,
            rotations,
            pool: pool.to_vec(),
            snapshot: state.allocation(),
            potential,
        });
    }
    Ok((state.allocation(), trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocation::{fairness_report, SearchConfig};
    use crate::valuation::Valuation;

    #[test]
    fn no_goods_no_rounds() {
        let v = Valuation::additive(vec![]).unwrap();
        let (a, t) = half_efx(&[v.clone(), v]).unwrap();
        assert_eq!(a, Allocation::empty(2, 0));
        assert_eq!(t.round_count, 0);
    }

    #[test]
    fn additive_pair_is_half_efx_every_round() {
        let vals = vec![
            Valuation::additive_ints(&[1, 1, 1, 4]).unwrap(),
            Valuation::additive_ints(&[4, 1, 1, 1]).unwrap(),
        ];
        let (a, t) = half_efx(&vals).unwrap();
        assert!(a.is_complete());
        let cfg = SearchConfig::default();
        for r in &t.rounds {
            let rep = fairness_report(&r.snapshot, &vals, &[rational::half()], false, &cfg).unwrap();
            assert_eq!(rep.c_efx(&rational::half()), Some(true), "round {}", r.round);
        }
        assert!(t.rounds.windows(2).all(|w| w[0].potential <= w[1].potential));
    }
}
