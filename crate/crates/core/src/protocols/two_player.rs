use super::same_ranking::same_ranking_efx;
use crate::allocation::{check_universe, Allocation, SearchConfig};
use crate::error::{Error, Result};
use crate::leximin::{solve, ComparatorKind};
use crate::valuation::ValueOracle;

/// Player 1 cuts with the leximin++ allocation for two copies of `v1`;
/// player 2 takes `A_1` whenever she values it at least as much as `A_2`.
pub fn cut_and_choose<V: ValueOracle>(v1: &V, v2: &V, cfg: &SearchConfig) -> Result<Allocation> {
    check_universe(v1.goods(), &[v1, v2])?;
    let cut = solve(&[v1, v1], ComparatorKind::LeximinPlusPlus, false, cfg)?;
    choose(cut, v2)
}

/// Player 1 cuts with the identical-ranking procedure run on two copies of
/// `v1`; player 2 chooses as in [`cut_and_choose`]. Polynomial in `m`.
pub fn two_player_additive_efx<V: ValueOracle>(v1: &V, v2: &V) -> Result<Allocation> {
    check_universe(v1.goods(), &[v1, v2])?;
    if v2.additive_values().is_none() {
        return Err(Error::Precondition("player 1 is not additive".into()));
    }
    let cut = same_ranking_efx(&[v1, v1])?;
    choose(cut, v2)
}

fn choose<V: ValueOracle>(cut: Allocation, v2: &V) -> Result<Allocation> {
    if v2.eval(*cut.bundle(0)) >= v2.eval(*cut.bundle(1)) {
        cut.permuted(&[1, 0])
    } else {
        Ok(cut)
    }
}
