use std::collections::HashSet;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use super::ValueOracle;
use crate::goods::GoodSet;
use crate::rational::Rational;

/// Wraps a valuation and counts the value queries made through it.
///
/// `total` counts every call; `distinct` counts distinct subsets. Both are
/// safe to bump from several threads at once.
pub struct QueryCountedValuation<V> {
    inner: V,
    total: AtomicU64,
    seen: Mutex<HashSet<u128>>,
}

impl<V: ValueOracle> QueryCountedValuation<V> {
    pub fn new(inner: V) -> Self {
        QueryCountedValuation {
            inner,
            total: AtomicU64::new(0),
            seen: Mutex::new(HashSet::new()),
        }
    }

    pub fn inner(&self) -> &V {
        &self.inner
    }

    pub fn total_queries(&self) -> u64 {
        self.total.load(Ordering::Relaxed)
    }

    pub fn distinct_queries(&self) -> u64 {
        self.seen.lock().expect("query set poisoned").len() as u64
    }

    pub fn reset(&self) {
        self.total.store(0, Ordering::Relaxed);
        self.seen.lock().expect("query set poisoned").clear();
    }
}

impl<V: ValueOracle> ValueOracle for QueryCountedValuation<V> {
    fn goods(&self) -> usize {
        self.inner.goods()
    }

    fn eval(&self, set: GoodSet) -> Rational {
        self.total.fetch_add(1, Ordering::Relaxed);
        self.seen.lock().expect("query set poisoned").insert(set.mask());
        self.inner.eval(set)
    }

    // Additive shortcuts would bypass the counter, so they are not forwarded.
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valuation::Valuation;

    #[test]
    fn counts_every_call_and_distinct_sets() {
        let v = QueryCountedValuation::new(Valuation::additive_ints(&[1, 2, 3]).unwrap());
        let a = GoodSet::from_goods([0, 2], 3).unwrap();
        let b = GoodSet::from_goods([1], 3).unwrap();
        assert_eq!(v.eval(a), v.inner().eval(a));
        v.eval(a);
        v.eval(b);
        assert_eq!(v.total_queries(), 3);
        assert_eq!(v.distinct_queries(), 2);
    }

    #[test]
    fn concurrent_increments_are_not_lost() {
        let v = QueryCountedValuation::new(Valuation::additive_ints(&[1; 8]).unwrap());
        std::thread::scope(|scope| {
            for t in 0..8u128 {
                let v = &v;
                scope.spawn(move || {
                    for mask in 0..256u128 {
                        v.eval(GoodSet::from_mask(mask ^ t, 8).unwrap());
                    }
                });
            }
        });
        assert_eq!(v.total_queries(), 8 * 256);
        assert_eq!(v.distinct_queries(), 256);
    }
}
