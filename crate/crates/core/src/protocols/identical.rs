use num_traits::Zero;

use super::additive_rows;
use crate::allocation::{Allocation, SearchConfig};
use crate::error::{Error, Result};
use crate::goods::GoodSet;
use crate::leximin::{solve, ComparatorKind};
use crate::valuation::{Valuation, ValueOracle};

/// EFX and Pareto-optimal allocation for `n` players sharing one additive
/// valuation that may value some goods at zero.
///
/// Plain leximin runs on the positively valued goods; the zero-valued goods
/// then all go to the lowest-index player of minimum utility.
pub fn efx_po_additive_identical<V: ValueOracle>(v: &V, n: usize, cfg: &SearchConfig) -> Result<Allocation> {
    if n == 0 {
        return Err(Error::usage("at least one player is required"));
    }
    let values = additive_rows(std::slice::from_ref(v), "the identical-additive procedure")?[0];
    let m = v.goods();
    let positive: Vec<usize> = (0..m).filter(|&g| !values[g].is_zero()).collect();
    let restricted = Valuation::additive(positive.iter().map(|&g| values[g].clone()).collect())?;
    let inner = solve(&vec![restricted; n], ComparatorKind::Leximin, false, cfg)?;

    let mut bundles: Vec<GoodSet> = inner
        .bundles()
        .iter()
        .map(|b| GoodSet::from_goods(b.iter().map(|x| positive[x]), m))
        .collect::<Result<_>>()?;
    let utilities: Vec<_> = bundles.iter().map(|b| v.eval(*b)).collect();
    let poorest = (0..n)
        .min_by(|&i, &j| utilities[i].cmp(&utilities[j]).then(i.cmp(&j)))
        .expect("n > 0");
    let zeros = GoodSet::from_goods((0..m).filter(|&g| values[g].is_zero()), m)?;
    bundles[poorest] = bundles[poorest].union(&zeros);
    Allocation::new(bundles, m)
}
