//! Subsets of a finite universe of goods `0..m`, stored as a bit mask.

use std::fmt;

use crate::error::{Error, Result};

/// Largest universe a [`GoodSet`] can describe.
pub const MAX_GOODS: usize = 128;

/// Index of a good in `0..m`.
pub type Good = usize;

/// A subset of the goods `0..m`.
///
/// Bit `g` of `mask` is set iff good `g` is in the set. The universe size
/// travels with the set so that operations can reject indices outside it.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GoodSet {
    mask: u128,
    m: u8,
}

fn full_mask(m: usize) -> u128 {
    if m == MAX_GOODS {
        u128::MAX
    } else {
        (1u128 << m) - 1
    }
}

impl GoodSet {
    pub fn empty(m: usize) -> Self {
        assert!(m <= MAX_GOODS, "universe of {m} goods exceeds {MAX_GOODS}");
        GoodSet { mask: 0, m: m as u8 }
    }

    pub fn full(m: usize) -> Self {
        let mut s = Self::empty(m);
        s.mask = full_mask(m);
        s
    }

    /// Builds a set from a raw mask, rejecting bits at or above `m`.
    pub fn from_mask(mask: u128, m: usize) -> Result<Self> {
        if m > MAX_GOODS {
            return Err(Error::usage(format!("universe of {m} goods exceeds {MAX_GOODS}")));
        }
        if mask & !full_mask(m) != 0 {
            return Err(Error::usage(format!("mask {mask:#b} references goods outside 0..{m}")));
        }
        Ok(GoodSet { mask, m: m as u8 })
    }

    pub fn from_goods<I: IntoIterator<Item = Good>>(goods: I, m: usize) -> Result<Self> {
        let mut s = Self::empty(m);
        for g in goods {
            if g >= m {
                return Err(Error::usage(format!("good {g} outside 0..{m}")));
            }
            s.mask |= 1u128 << g;
        }
        Ok(s)
    }

    pub fn singleton(g: Good, m: usize) -> Result<Self> {
        Self::from_goods([g], m)
    }

    #[inline]
    pub fn mask(&self) -> u128 {
        self.mask
    }

    #[inline]
    pub fn universe(&self) -> usize {
        self.m as usize
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    #[inline]
    pub fn contains(&self, g: Good) -> bool {
        g < self.universe() && self.mask >> g & 1 == 1
    }

    pub fn is_subset(&self, other: &GoodSet) -> bool {
        self.mask & !other.mask == 0
    }

    pub fn is_disjoint(&self, other: &GoodSet) -> bool {
        self.mask & other.mask == 0
    }

    pub fn union(&self, other: &GoodSet) -> GoodSet {
        debug_assert_eq!(self.m, other.m);
        GoodSet {
            mask: self.mask | other.mask,
            m: self.m,
        }
    }

    pub fn intersection(&self, other: &GoodSet) -> GoodSet {
        debug_assert_eq!(self.m, other.m);
        GoodSet {
            mask: self.mask & other.mask,
            m: self.m,
        }
    }

    pub fn difference(&self, other: &GoodSet) -> GoodSet {
        debug_assert_eq!(self.m, other.m);
        GoodSet {
            mask: self.mask & !other.mask,
            m: self.m,
        }
    }

    pub fn complement(&self) -> GoodSet {
        GoodSet {
            mask: !self.mask & full_mask(self.universe()),
            m: self.m,
        }
    }

    /// `self ∪ {g}`. Panics if `g` is outside the universe.
    pub fn with(&self, g: Good) -> GoodSet {
        assert!(g < self.universe(), "good {g} outside 0..{}", self.m);
        GoodSet {
            mask: self.mask | 1u128 << g,
            m: self.m,
        }
    }

    /// `self ∖ {g}`.
    pub fn without(&self, g: Good) -> GoodSet {
        if g >= self.universe() {
            return *self;
        }
        GoodSet {
            mask: self.mask & !(1u128 << g),
            m: self.m,
        }
    }

    /// Goods in ascending index order.
    pub fn iter(&self) -> Goods {
        Goods { rest: self.mask }
    }

    pub fn to_vec(&self) -> Vec<Good> {
        self.iter().collect()
    }
}

/// Iterator over the members of a [`GoodSet`], lowest index first.
#[derive(Clone)]
pub struct Goods {
    rest: u128,
}

impl Iterator for Goods {
    type Item = Good;

    fn next(&mut self) -> Option<Good> {
        if self.rest == 0 {
            return None;
        }
        let g = self.rest.trailing_zeros() as usize;
        self.rest &= self.rest - 1;
        Some(g)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.rest.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Goods {}

impl IntoIterator for &GoodSet {
    type Item = Good;
    type IntoIter = Goods;

    fn into_iter(self) -> Goods {
        self.iter()
    }
}

impl fmt::Debug for GoodSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for GoodSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, g) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, "}}")
    }
}

/// Iterates all `2^m` masks of a universe in ascending numeric order.
pub fn all_masks(m: usize) -> impl Iterator<Item = u128> {
    assert!(m < MAX_GOODS);
    0..(1u128 << m)
}

/// Iterates the submasks of `mask` (including 0 and `mask` itself), in descending order.
pub fn submasks(mask: u128) -> impl Iterator<Item = u128> {
    let mut next = Some(mask);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & mask) };
        Some(cur)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_out_of_universe() {
        assert!(GoodSet::from_mask(0b1000, 3).is_err());
        assert!(GoodSet::from_goods([3], 3).is_err());
        assert!(GoodSet::from_mask(0b111, 3).is_ok());
    }

    #[test]
    fn full_universe_of_128() {
        let s = GoodSet::full(128);
        assert_eq!(s.len(), 128);
        assert!(s.complement().is_empty());
    }

    #[test]
    fn submask_count() {
        assert_eq!(submasks(0b1011).count(), 8);
        assert_eq!(submasks(0).collect::<Vec<_>>(), vec![0]);
    }

    proptest! {
        #[test]
        fn operations_stay_in_universe(a in 0u128..256, b in 0u128..256, g in 0usize..8) {
            let m = 8;
            let s = GoodSet::from_mask(a, m).unwrap();
            let t = GoodSet::from_mask(b, m).unwrap();
            for r in [s.union(&t), s.difference(&t), s.intersection(&t), s.complement(), s.with(g), s.without(g)] {
                prop_assert!(GoodSet::from_mask(r.mask(), m).is_ok());
            }
            prop_assert_eq!(s.union(&s.complement()), GoodSet::full(m));
            prop_assert!(s.without(g).is_subset(&s));
            prop_assert_eq!(s.iter().count(), s.len());
        }
    }
}
