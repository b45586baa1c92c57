use std::cmp::Ordering;

use super::additive_rows;
use crate::allocation::{check_universe, Allocation, EnvyState};
use crate::error::{Error, Result};
use crate::goods::Good;
use crate::rational::Rational;
use crate::valuation::ValueOracle;

/// Goods from most to least valuable under the ranking every player shares
/// (ties by index). Fails with a witness when two players order some pair
/// of goods differently, ties included.
pub fn shared_ranking(rows: &[&[Rational]]) -> Result<Vec<Good>> {
    let Some(first) = rows.first() else {
        return Ok(Vec::new());
    };
    let mut order: Vec<Good> = (0..first.len()).collect();
    order.sort_by(|&g, &h| first[h].cmp(&first[g]).then(g.cmp(&h)));
    // Same weak order iff every player agrees with player 0 on consecutive pairs.
    for w in order.windows(2) {
        let (g, h) = (w[0], w[1]);
        let reference = first[g].cmp(&first[h]);
        if let Some(i) = rows.iter().position(|r| r[g].cmp(&r[h]) != reference) {
            let relation = |o: Ordering| match o {
                Ordering::Less => "less than",
                Ordering::Equal => "equal to",
                Ordering::Greater => "more than",
            };
            return Err(Error::Precondition(format!(
                "rankings differ: player 0 values good {g} {} good {h}, player {i} values it {}",
                relation(reference),
                relation(rows[i][g].cmp(&rows[i][h]))
            )));
        }
    }
    Ok(order)
}

/// Hands out goods in shared-ranking order, each to the lowest-index
/// unenvied player, eliminating envy cycles after every good.
pub fn same_ranking_efx<V: ValueOracle>(valuations: &[V]) -> Result<Allocation> {
    run(valuations, false).map(|(a, _)| a)
}

/// As [`same_ranking_efx`], also returning the allocation after each good.
pub fn same_ranking_efx_with_snapshots<V: ValueOracle>(valuations: &[V]) -> Result<(Allocation, Vec<Allocation>)> {
    run(valuations, true)
}

fn run<V: ValueOracle>(valuations: &[V], snapshots: bool) -> Result<(Allocation, Vec<Allocation>)> {
    if valuations.is_empty() {
        return Err(Error::usage("at least one player is required"));
    }
    let m = valuations[0].goods();
    check_universe(m, valuations)?;
    let rows = additive_rows(valuations, "the identical-ranking procedure")?;
    let order = shared_ranking(&rows)?;
    let mut state = EnvyState::new(&Allocation::empty(valuations.len(), m), valuations);
    let mut history = Vec::new();
    for g in order {
        let j = state
            .unenvied()
            .ok_or_else(|| Error::Invariant("no unenvied player after cycle elimination".into()))?;
        state.add_additive(j, g, &rows);
        state.eliminate_cycles()?;
        if snapshots {
            history.push(state.allocation());
        }
    }
    Ok((state.allocation(), history))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valuation::Valuation;

    #[test]
    fn four_three_two_one() {
        let v = Valuation::additive_ints(&[4, 3, 2, 1]).unwrap();
        let a = same_ranking_efx(&[v.clone(), v]).unwrap();
        assert_eq!(a, Allocation::from_goods(&[&[0, 3], &[1, 2]], 4).unwrap());
    }

    #[test]
    fn single_player_gets_everything() {
        let v = Valuation::additive_ints(&[1, 5, 2]).unwrap();
        assert!(same_ranking_efx(&[v]).unwrap().bundle(0).len() == 3);
    }

    #[test]
    fn mismatched_rankings_are_rejected() {
        let vals = vec![
            Valuation::additive_ints(&[2, 1]).unwrap(),
            Valuation::additive_ints(&[1, 2]).unwrap(),
        ];
        assert!(matches!(same_ranking_efx(&vals), Err(Error::Precondition(_))));
        let ties = vec![
            Valuation::additive_ints(&[1, 1]).unwrap(),
            Valuation::additive_ints(&[2, 1]).unwrap(),
        ];
        assert!(same_ranking_efx(&ties).is_err());
    }

    #[test]
    fn table_valuations_are_rejected() {
        let v = Valuation::table(
            1,
            vec![Rational::from_integer(0.into()), Rational::from_integer(1.into())],
        )
        .unwrap();
        assert!(matches!(same_ranking_efx(&[v]), Err(Error::Precondition(_))));
    }
}
