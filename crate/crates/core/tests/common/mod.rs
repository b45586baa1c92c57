//! Independent reference implementations used as test oracles.
//!
//! Nothing here calls the library's predicates or enumerators: values come
//! from `ValueOracle::value` and allocations from a plain recursive
//! assignment of owners to goods.

#![allow(dead_code, clippy::needless_range_loop)]

use efx_core::allocation::Allocation;
use efx_core::goods::GoodSet;
use efx_core::rational::Rational;
use efx_core::valuation::{Valuation, ValueOracle};

pub fn val(v: &Valuation, goods: &[usize]) -> Rational {
    v.value(&GoodSet::from_goods(goods.iter().copied(), v.goods()).unwrap())
        .unwrap()
}

fn bundles(a: &Allocation) -> Vec<Vec<usize>> {
    a.to_goods()
}

fn without(b: &[usize], g: usize) -> Vec<usize> {
    b.iter().copied().filter(|&x| x != g).collect()
}

/// `v_i(A_i) ≥ c · v_i(A_j ∖ g)` for every `i ≠ j` and `g ∈ A_j`.
pub fn is_c_efx(a: &Allocation, vals: &[Valuation], c: &Rational) -> bool {
    let b = bundles(a);
    for i in 0..b.len() {
        let mine = val(&vals[i], &b[i]);
        for j in 0..b.len() {
            if i == j {
                continue;
            }
            for &g in &b[j] {
                if mine < c * val(&vals[i], &without(&b[j], g)) {
                    return false;
                }
            }
        }
    }
    true
}

pub fn is_efx(a: &Allocation, vals: &[Valuation]) -> bool {
    is_c_efx(a, vals, &Rational::from_integer(1.into()))
}

pub fn is_ef1(a: &Allocation, vals: &[Valuation]) -> bool {
    let b = bundles(a);
    for i in 0..b.len() {
        let mine = val(&vals[i], &b[i]);
        for j in 0..b.len() {
            if i == j || mine >= val(&vals[i], &b[j]) {
                continue;
            }
            if !b[j].iter().any(|&g| mine >= val(&vals[i], &without(&b[j], g))) {
                return false;
            }
        }
    }
    true
}

pub fn is_envy_free(a: &Allocation, vals: &[Valuation]) -> bool {
    let b = bundles(a);
    (0..b.len()).all(|i| (0..b.len()).all(|j| val(&vals[i], &b[i]) >= val(&vals[i], &b[j])))
}

/// Every complete allocation, built by recursion over the goods.
pub fn all_allocations(n: usize, m: usize) -> Vec<Allocation> {
    fn go(g: usize, n: usize, m: usize, cur: &mut Vec<Vec<usize>>, out: &mut Vec<Allocation>) {
        if g == m {
            let refs: Vec<&[usize]> = cur.iter().map(|b| b.as_slice()).collect();
            out.push(Allocation::from_goods(&refs, m).unwrap());
            return;
        }
        for i in 0..n {
            cur[i].push(g);
            go(g + 1, n, m, cur, out);
            cur[i].pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, m, &mut vec![Vec::new(); n], &mut out);
    out
}

pub fn utilities(a: &Allocation, vals: &[Valuation]) -> Vec<Rational> {
    bundles(a).iter().zip(vals).map(|(b, v)| val(v, b)).collect()
}

/// No complete allocation leaves everyone weakly and someone strictly better off.
pub fn is_pareto_optimal(a: &Allocation, vals: &[Valuation]) -> bool {
    let base = utilities(a, vals);
    !all_allocations(a.players(), a.goods()).iter().any(|b| {
        let u = utilities(b, vals);
        u.iter().zip(&base).all(|(x, y)| x >= y) && u.iter().zip(&base).any(|(x, y)| x > y)
    })
}

/// Sorted `(utility, bundle size)` multiset; equal for allocations that
/// neither leximin++ ordering can separate.
pub fn signature(a: &Allocation, vals: &[Valuation]) -> Vec<(Rational, usize)> {
    let mut s: Vec<(Rational, usize)> = utilities(a, vals)
        .into_iter()
        .zip(a.bundles().iter().map(|b| b.len()))
        .collect();
    s.sort();
    s
}
