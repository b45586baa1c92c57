//! Exhaustive membership checks for the valuation classes.

use serde::Serialize;

use super::ValueOracle;
use crate::error::{Error, Result};
use crate::goods::{Good, GoodSet};
use crate::rational::Rational;

/// Largest universes the exhaustive scans accept.
#[derive(Clone, Copy, Debug)]
pub struct ClassLimits {
    /// Monotonicity and nonzero-marginal-utility scans (`2^m · m` steps).
    pub marginal_max_goods: usize,
    /// Submodularity and subadditivity scans (`2^m · m²` and `3^m` steps).
    pub pairwise_max_goods: usize,
    /// Subadditivity of a non-monotone function needs all `4^m` pairs.
    pub nonmonotone_subadditive_max_goods: usize,
}

impl Default for ClassLimits {
    fn default() -> Self {
        ClassLimits {
            marginal_max_goods: 20,
            pairwise_max_goods: 14,
            nonmonotone_subadditive_max_goods: 10,
        }
    }
}

/// The first violation found by a scan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "property", rename_all = "snake_case")]
pub enum ClassWitness {
    /// `v(set ∪ {good}) < v(set)`.
    Monotone { set: Vec<Good>, good: Good },
    /// `v(set ∪ {good}) − v(set) ≤ 0`.
    NonzeroMarginal { set: Vec<Good>, good: Good },
    /// `smaller ⊆ larger`, `good ∉ larger`, and the marginal of `good` grows.
    Submodular {
        smaller: Vec<Good>,
        larger: Vec<Good>,
        good: Good,
    },
    /// `v(left) + v(right) < v(left ∪ right)`.
    Subadditive { left: Vec<Good>, right: Vec<Good> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassReport {
    pub monotone: bool,
    pub submodular: bool,
    pub subadditive: bool,
    pub nonzero_marginal_utility: bool,
    pub witnesses: Vec<ClassWitness>,
}

impl ClassReport {
    pub fn witness_for(&self, property: &str) -> Option<&ClassWitness> {
        self.witnesses.iter().find(|w| {
            matches!(
                (property, w),
                ("monotone", ClassWitness::Monotone { .. })
                    | ("nonzero_marginal_utility", ClassWitness::NonzeroMarginal { .. })
                    | ("submodular", ClassWitness::Submodular { .. })
                    | ("subadditive", ClassWitness::Subadditive { .. })
            )
        })
    }
}

fn goods_of(mask: usize) -> Vec<Good> {
    (0..usize::BITS as usize).filter(|g| mask >> g & 1 == 1).collect()
}

fn capacity(what: &str, m: usize, limit: usize) -> Error {
    Error::Capacity {
        what: format!("{what} scan over {m} goods"),
        needed: 1u128 << m.min(127),
        limit: 1u128 << limit.min(127),
    }
}

/// Scans all four classes exhaustively.
///
/// Every flag is exact; there is no sampling. Universes beyond `limits`
/// are refused with a capacity error.
pub fn check_class<V: ValueOracle + ?Sized>(v: &V, limits: &ClassLimits) -> Result<ClassReport> {
    let m = v.goods();
    if m > limits.marginal_max_goods {
        return Err(capacity("monotonicity", m, limits.marginal_max_goods));
    }
    if m > limits.pairwise_max_goods {
        return Err(capacity("submodularity", m, limits.pairwise_max_goods));
    }
    let values: Vec<Rational> = (0..1u128 << m)
        .map(|mask| v.eval(GoodSet::from_mask(mask, m).expect("in universe")))
        .collect();

    let mut witnesses = Vec::new();
    let mut monotone = true;
    let mut nonzero = true;
    'outer: for s in 0..values.len() {
        for g in (0..m).filter(|g| s >> g & 1 == 0) {
            let up = &values[s | 1 << g];
            if monotone && *up < values[s] {
                monotone = false;
                witnesses.push(ClassWitness::Monotone {
                    set: goods_of(s),
                    good: g,
                });
            }
            if nonzero && *up <= values[s] {
                nonzero = false;
                witnesses.push(ClassWitness::NonzeroMarginal {
                    set: goods_of(s),
                    good: g,
                });
            }
            if !monotone && !nonzero {
                break 'outer;
            }
        }
    }

    // Diminishing returns is equivalent to the local condition
    // v(S+x) + v(S+y) ≥ v(S+x+y) + v(S) for x ≠ y outside S.
    let mut submodular = true;
    'sub: for s in 0..values.len() {
        for y in (0..m).filter(|y| s >> y & 1 == 0) {
            for x in (0..m).filter(|&x| x != y && s >> x & 1 == 0) {
                let lhs = &values[s | 1 << x] - &values[s];
                let rhs = &values[s | 1 << x | 1 << y] - &values[s | 1 << y];
                if lhs < rhs {
                    submodular = false;
                    witnesses.push(ClassWitness::Submodular {
                        smaller: goods_of(s),
                        larger: goods_of(s | 1 << y),
                        good: x,
                    });
                    break 'sub;
                }
            }
        }
    }

    let full = values.len() - 1;
    let mut subadditive = true;
    let check_pair = |s: usize, t: usize, witnesses: &mut Vec<ClassWitness>| {
        if &values[s] + &values[t] < values[s | t] {
            witnesses.push(ClassWitness::Subadditive {
                left: goods_of(s),
                right: goods_of(t),
            });
            return false;
        }
        true
    };
    if monotone {
        // Under monotonicity v(T) ≥ v(T ∖ S), so disjoint pairs decide the question.
        'add: for s in 0..values.len() {
            let rest = full & !s;
            let mut t = rest;
            loop {
                if !check_pair(s, t, &mut witnesses) {
                    subadditive = false;
                    break 'add;
                }
                if t == 0 {
                    break;
                }
                t = (t - 1) & rest;
            }
        }
    } else {
        if m > limits.nonmonotone_subadditive_max_goods {
            return Err(capacity(
                "subadditivity (non-monotone)",
                m,
                limits.nonmonotone_subadditive_max_goods,
            ));
        }
        'all: for s in 0..values.len() {
            for t in 0..values.len() {
                if !check_pair(s, t, &mut witnesses) {
                    subadditive = false;
                    break 'all;
                }
            }
        }
    }

    Ok(ClassReport {
        monotone,
        submodular,
        subadditive,
        nonzero_marginal_utility: nonzero,
        witnesses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use crate::valuation::Valuation;

    #[test]
    fn positive_additive_is_in_every_class() {
        let v = Valuation::additive_ints(&[5, 3, 1]).unwrap();
        let r = check_class(&v, &ClassLimits::default()).unwrap();
        assert!(r.monotone && r.submodular && r.subadditive && r.nonzero_marginal_utility);
        assert!(r.witnesses.is_empty());
    }

    #[test]
    fn zero_good_breaks_nonzero_marginal() {
        let v = Valuation::table(2, vec![int(0), int(0), int(1), int(2)]).unwrap();
        let r = check_class(&v, &ClassLimits::default()).unwrap();
        assert!(r.monotone);
        assert!(!r.nonzero_marginal_utility);
        assert_eq!(
            r.witness_for("nonzero_marginal_utility"),
            Some(&ClassWitness::NonzeroMarginal { set: vec![], good: 0 })
        );
        // v({a}) + v({b}) = 1 < 2 = v({a,b})
        assert!(!r.subadditive);
        assert!(!r.submodular);
    }

    #[test]
    fn complements_are_not_submodular() {
        // v = 1 only when both goods are present
        let v = Valuation::table(2, vec![int(0), int(0), int(0), int(1)]).unwrap();
        let r = check_class(&v, &ClassLimits::default()).unwrap();
        assert!(!r.submodular);
        let w = r.witness_for("submodular").unwrap();
        assert_eq!(
            w,
            &ClassWitness::Submodular {
                smaller: vec![],
                larger: vec![0],
                good: 1
            }
        );
    }

    #[test]
    fn nonmonotone_witness() {
        let v = Valuation::table_with(2, vec![int(0), int(2), int(1), int(1)], false, 20).unwrap();
        let r = check_class(&v, &ClassLimits::default()).unwrap();
        assert!(!r.monotone);
        assert_eq!(
            r.witness_for("monotone"),
            Some(&ClassWitness::Monotone { set: vec![0], good: 1 })
        );
    }

    #[test]
    fn refuses_large_universes() {
        let v = Valuation::additive_ints(&[1; 15]).unwrap();
        assert!(matches!(
            check_class(&v, &ClassLimits::default()),
            Err(Error::Capacity { .. })
        ));
        let small = Valuation::additive_ints(&[1; 5]).unwrap();
        let tight = ClassLimits {
            pairwise_max_goods: 4,
            ..Default::default()
        };
        assert!(matches!(check_class(&small, &tight), Err(Error::Capacity { .. })));
        let relaxed = ClassLimits {
            pairwise_max_goods: 5,
            ..Default::default()
        };
        assert!(check_class(&small, &relaxed).unwrap().submodular);
    }
}
