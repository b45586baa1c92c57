use std::cmp::Ordering;
use std::ops::Range;

use num_traits::{One, Zero};

use crate::allocation::{check_capacity, check_universe, scan_chunks, Allocation, Odometer, SearchConfig, Utilities};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::valuation::ValueOracle;

/// `(players with positive utility, product of their utilities)`.
type Welfare = (usize, Rational);

fn better(a: &Welfare, b: &Welfare) -> bool {
    match a.0.cmp(&b.0) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => a.1 > b.1,
    }
}

/// Earliest complete allocation maximizing the number of players with
/// positive utility, then the product of those utilities.
pub fn max_nash_welfare<V: ValueOracle>(valuations: &[V], cfg: &SearchConfig) -> Result<Allocation> {
    let n = valuations.len();
    let m = valuations.first().map_or(0, |v| v.goods());
    check_universe(m, valuations)?;
    let total = check_capacity(n, m, cfg, "Nash welfare search")?;
    let utils = Utilities::build(valuations, m, false)?;
    let mut best: Option<(Vec<u128>, Welfare)> = None;
    for candidate in scan_chunks(total, cfg, |range| best_in_range(&utils, n, m, range))
        .into_iter()
        .flatten()
    {
        if best.as_ref().is_none_or(|(_, w)| better(&candidate.1, w)) {
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
    range: Range<u64>,
) -> Option<(Vec<u128>, Welfare)> {
    let mut odo = Odometer::new(n, m, range);
    if odo.is_empty() {
        return None;
    }
    let mut best: Option<(Vec<u128>, Welfare)> = None;
    loop {
        let mut w: Welfare = (0, Rational::one());
        for (i, &b) in odo.masks().iter().enumerate() {
            let u = utils.get(i, b, m);
            if !u.is_zero() {
                w.0 += 1;
                w.1 *= u.as_ref();
            }
        }
        if best.as_ref().is_none_or(|(_, x)| better(&w, x)) {
            best = Some((odo.masks().to_vec(), w));
        }
        if !odo.advance() {
            return best;
        }
    }
}
