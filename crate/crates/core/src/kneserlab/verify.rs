//! Exhaustive and arithmetic checks of the combinatorial facts behind the
//! query lower bound.

use std::collections::VecDeque;
use std::sync::Arc;

use num_bigint::BigInt;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{binomial, build_reduction_valuation, is_local_max, KneserGraph, ScoreOracle};
use crate::allocation::{enumerate_allocations, fairness_report, Allocation, SearchConfig};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

fn ratio(num: u128, den: u128) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorrespondenceReport {
    pub k: usize,
    pub allocations: u64,
    pub efx_allocations: u64,
    /// Every EFX allocation splits the goods into sizes `k` and `k + 1`.
    pub sizes_hold: bool,
    /// EFX exactly when the size-`k` bundle is a local maximum.
    pub equivalence_holds: bool,
    pub holds: bool,
    /// First allocation breaking either property.
    pub counterexample: Option<Allocation>,
}

/// Scans all `2^(2k+1)` allocations of the reduction instance with two
/// identical players.
pub fn verify_correspondence(k: usize, f: Arc<ScoreOracle>) -> Result<CorrespondenceReport> {
    if k == 0 || k > 3 {
        return Err(Error::Capacity {
            what: "correspondence scan (k must be 1..=3)".into(),
            needed: 1u128 << (2 * k + 1).min(127),
            limit: 1 << 7,
        });
    }
    let g = KneserGraph::odd(k)?;
    let v = build_reduction_valuation(k, f.clone())?;
    let vals = [v.clone(), v];
    let m = 2 * k + 1;
    let cfg = SearchConfig::default();
    let mut report = CorrespondenceReport {
        k,
        allocations: 0,
        efx_allocations: 0,
        sizes_hold: true,
        equivalence_holds: true,
        holds: true,
        counterexample: None,
    };
    for a in enumerate_allocations(2, m, &cfg)? {
        report.allocations += 1;
        let efx = fairness_report(&a, &vals, &[], false, &cfg)?.efx;
        let sizes = (a.bundle(0).len(), a.bundle(1).len());
        let split = sizes == (k, k + 1) || sizes == (k + 1, k);
        let mut ok = true;
        if efx {
            report.efx_allocations += 1;
            if !split {
                report.sizes_hold = false;
                ok = false;
            }
        }
        if split {
            let small = if sizes.0 == k { a.bundle(0) } else { a.bundle(1) };
            let rank = g.rank_of(small.mask()).expect("size-k bundle is a vertex");
            if is_local_max(&g, &f, rank)? != efx {
                report.equivalence_holds = false;
                ok = false;
            }
        }
        if !ok && report.counterexample.is_none() {
            report.counterexample = Some(a);
        }
    }
    report.holds = report.sizes_hold && report.equivalence_holds;
    Ok(report)
}

/// Vertices outside `s` adjacent to some member of `s`, ascending.
pub fn boundary(g: &KneserGraph, s: &[usize]) -> Result<Vec<usize>> {
    let count = g.vertex_count();
    let mut inside = vec![false; count];
    for &v in s {
        if v >= count {
            return Err(Error::usage(format!("vertex rank {v} out of range")));
        }
        inside[v] = true;
    }
    let mut hit = vec![false; count];
    for &v in s {
        for w in g.neighbors(v) {
            hit[w] = true;
        }
    }
    Ok((0..count).filter(|&w| hit[w] && !inside[w]).collect())
}

/// `C(n,k) − C(n−1,k−1)²/r − r`.
pub fn beta(n: usize, k: usize, r: u128) -> Result<Rational> {
    if r == 0 || k == 0 {
        return Err(Error::usage("beta needs r >= 1 and k >= 1"));
    }
    let total = binomial(n as u64, k as u64).ok_or_else(|| Error::usage("C(n, k) overflows"))?;
    let inner = binomial(n as u64 - 1, k as u64 - 1).ok_or_else(|| Error::usage("C(n-1, k-1) overflows"))?;
    let sq = BigInt::from(inner) * BigInt::from(inner);
    Ok(Rational::from_integer(BigInt::from(total))
        - Rational::new(sq, BigInt::from(r))
        - Rational::from_integer(BigInt::from(r)))
}

/// Random `r`-subsets examined when `μ(r)` cannot be computed exhaustively.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundarySampling {
    pub samples: u64,
    pub seed: u64,
}

/// Graphs up to this many vertices get an exhaustive `μ(r)`.
pub const EXHAUSTIVE_BOUNDARY_VERTICES: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundaryReport {
    pub n: usize,
    pub k: usize,
    pub r: usize,
    /// Smallest boundary size seen over the examined `r`-subsets.
    pub mu: u64,
    #[serde(with = "rational::as_string")]
    pub beta: Rational,
    pub holds: bool,
    /// False when `mu` is a sampled upper estimate of the true minimum.
    pub exhaustive: bool,
    pub examined: u64,
}

/// Compares `μ(r) = min_{|S|=r} |B(S)|` with `β(r)`.
pub fn verify_boundary_bound(g: &KneserGraph, r: usize, sampling: Option<BoundarySampling>) -> Result<BoundaryReport> {
    let count = g.vertex_count();
    if r == 0 || r > count {
        return Err(Error::usage(format!("r must lie in 1..={count}")));
    }
    let b = beta(g.n(), g.k(), r as u128)?;
    let neighbor_sets: Vec<Vec<usize>> = (0..count).map(|v| g.neighbors(v)).collect();
    let boundary_size = |s: &[usize], inside: &mut Vec<bool>, hit: &mut Vec<bool>| -> u64 {
        inside.iter_mut().for_each(|x| *x = false);
        hit.iter_mut().for_each(|x| *x = false);
        for &v in s {
            inside[v] = true;
        }
        for &v in s {
            for &w in &neighbor_sets[v] {
                hit[w] = true;
            }
        }
        (0..count).filter(|&w| hit[w] && !inside[w]).count() as u64
    };
    let mut inside = vec![false; count];
    let mut hit = vec![false; count];
    let mut mu = u64::MAX;
    let mut examined = 0u64;
    let exhaustive = count <= EXHAUSTIVE_BOUNDARY_VERTICES;
    if exhaustive {
        let full = (1u128 << count) - 1;
        for subset in super::subsets_of(full, r) {
            let s: Vec<usize> = (0..count).filter(|&v| subset >> v & 1 == 1).collect();
            mu = mu.min(boundary_size(&s, &mut inside, &mut hit));
            examined += 1;
        }
    } else {
        let Some(BoundarySampling { samples, seed }) = sampling else {
            return Err(Error::Capacity {
                what: format!(
                    "exhaustive boundary minimum on K({}, {}) (enable sampling)",
                    g.n(),
                    g.k()
                ),
                needed: binomial(count as u64, r as u64).unwrap_or(u128::MAX),
                limit: binomial(
                    EXHAUSTIVE_BOUNDARY_VERTICES as u64,
                    (EXHAUSTIVE_BOUNDARY_VERTICES / 2) as u64,
                )
                .expect("small"),
            });
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples.max(1) {
            let s = sample(&mut rng, count, r).into_vec();
            mu = mu.min(boundary_size(&s, &mut inside, &mut hit));
            examined += 1;
        }
    }
    let holds = Rational::from_integer(BigInt::from(mu)) >= b;
    Ok(BoundaryReport {
        n: g.n(),
        k: g.k(),
        r,
        mu,
        beta: b,
        holds,
        exhaustive,
        examined,
    })
}

/// How [`verify_beta_monotone`] covered the range `2..=r_max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaCheck {
    /// `β(r − 1) ≤ β(r)` compared as exact rationals for every `r`.
    Rational,
    /// Every step checked through `β(r) − β(r−1) = R²/(r(r−1)) − 1 ≥ 0`
    /// in integers, where `R = C(2k, k−1)`.
    Difference,
    /// The step differences decrease in `r`, so only the last step is checked.
    Endpoint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BetaReport {
    pub k: usize,
    pub r_max: u128,
    pub holds: bool,
    pub method: BetaCheck,
}

const BETA_RATIONAL_LIMIT: u128 = 200_000;
const BETA_DIFFERENCE_LIMIT: u128 = 50_000_000;

/// `β` on `K(2k+1, k)` is non-decreasing over `1..=C(2k, k−1)`.
pub fn verify_beta_monotone(k: usize) -> Result<BetaReport> {
    if k == 0 || k > 20 {
        return Err(Error::usage("k must lie in 1..=20"));
    }
    let n = 2 * k + 1;
    let r_max = binomial(2 * k as u64, k as u64 - 1).expect("small");
    let (holds, method) = if r_max <= BETA_RATIONAL_LIMIT {
        let mut prev = beta(n, k, 1)?;
        let mut holds = true;
        for r in 2..=r_max {
            let next = beta(n, k, r)?;
            holds &= prev <= next;
            prev = next;
        }
        (holds, BetaCheck::Rational)
    } else {
        let sq = r_max * r_max;
        if r_max <= BETA_DIFFERENCE_LIMIT {
            ((2..=r_max).all(|r| sq >= r * (r - 1)), BetaCheck::Difference)
        } else {
            (sq >= r_max * (r_max - 1), BetaCheck::Endpoint)
        }
    };
    Ok(BetaReport {
        k,
        r_max,
        holds,
        method,
    })
}

/// `C(2k, k−1) / (2k + 1)`.
pub fn lower_bound_value(k: usize) -> Result<Rational> {
    if k == 0 {
        return Err(Error::usage("k must be at least 1"));
    }
    let r_max = binomial(2 * k as u64, k as u64 - 1).ok_or_else(|| Error::usage("C(2k, k-1) overflows"))?;
    Ok(ratio(r_max, 2 * k as u128 + 1))
}

/// Largest vertex count for the all-pairs diameter scan.
pub const DIAMETER_MAX_VERTICES: u128 = 2_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiameterReport {
    pub k: usize,
    pub vertices: usize,
    pub diameter: usize,
    pub holds: bool,
}

/// Breadth-first search from every vertex of `K(2k+1, k)`; holds iff the
/// diameter equals `k`.
pub fn verify_diameter(k: usize) -> Result<DiameterReport> {
    if k == 0 {
        return Err(Error::usage("k must be at least 1"));
    }
    let count = binomial(2 * k as u64 + 1, k as u64).unwrap_or(u128::MAX);
    if count > DIAMETER_MAX_VERTICES {
        return Err(Error::Capacity {
            what: format!("diameter of K({}, {k})", 2 * k + 1),
            needed: count,
            limit: DIAMETER_MAX_VERTICES,
        });
    }
    let g = KneserGraph::odd(k)?;
    let adj: Vec<Vec<usize>> = (0..g.vertex_count()).map(|v| g.neighbors(v)).collect();
    let eccentricity = |src: usize| -> usize {
        let mut dist = vec![usize::MAX; adj.len()];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        let mut far = 0;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    far = far.max(dist[w]);
                    queue.push_back(w);
                }
            }
        }
        if dist.contains(&usize::MAX) {
            usize::MAX
        } else {
            far
        }
    };
    let diameter = (0..adj.len()).into_par_iter().map(eccentricity).max().unwrap_or(0);
    Ok(DiameterReport {
        k,
        vertices: adj.len(),
        diameter,
        holds: diameter == k,
    })
}

/// Largest vertex count for the family-pair scan (`4^V` pairs).
pub const CROSS_MAX_VERTICES: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossIntersectingReport {
    pub n: usize,
    pub k: usize,
    /// Cross-intersecting ordered pairs `(X, Y)` found.
    pub pairs: u64,
    pub max_product: u64,
    /// `C(n−1, k−1)²`.
    pub bound: u64,
    pub holds: bool,
    /// The two stars at element 0 cross-intersect and reach the bound.
    pub tight: bool,
}

/// Scans every pair of families of `k`-subsets of `0..n`.
pub fn verify_cross_intersecting(n: usize, k: usize) -> Result<CrossIntersectingReport> {
    if k == 0 || n < 2 * k {
        return Err(Error::usage("need 1 <= k and 2k <= n"));
    }
    let g = KneserGraph::new(n, k)?;
    let count = g.vertex_count();
    if count > CROSS_MAX_VERTICES {
        return Err(Error::Capacity {
            what: format!("family pairs of K({n}, {k})"),
            needed: 1u128 << (2 * count).min(127),
            limit: 1u128 << (2 * CROSS_MAX_VERTICES),
        });
    }
    // meets[v]: vertices sharing an element with v
    let meets: Vec<u32> = (0..count)
        .map(|v| {
            (0..count)
                .filter(|&w| !g.adjacent(v, w))
                .fold(0u32, |acc, w| acc | 1 << w)
        })
        .collect();
    let families = 1u32 << count;
    let per_x: Vec<(u64, u64)> = (0..families)
        .into_par_iter()
        .map(|x| {
            let cap = (0..count)
                .filter(|&v| x >> v & 1 == 1)
                .fold(families - 1, |acc, v| acc & meets[v]);
            let mut pairs = 0u64;
            let mut best = 0u64;
            for y in 0..families {
                if y & !cap == 0 {
                    pairs += 1;
                    best = best.max(u64::from(x.count_ones()) * u64::from(y.count_ones()));
                }
            }
            (pairs, best)
        })
        .collect();
    let pairs = per_x.iter().map(|p| p.0).sum();
    let max_product = per_x.iter().map(|p| p.1).max().unwrap_or(0);
    let inner = binomial(n as u64 - 1, k as u64 - 1).expect("small") as u64;
    let bound = inner * inner;
    let star = (0..count)
        .filter(|&v| g.vertex(v) & 1 == 1)
        .fold(0u32, |acc, v| acc | 1 << v);
    let star_cross = (0..count)
        .filter(|&v| star >> v & 1 == 1)
        .all(|v| star & !meets[v] == 0);
    let star_size = u64::from(star.count_ones());
    Ok(CrossIntersectingReport {
        n,
        k,
        pairs,
        max_product,
        bound,
        holds: max_product <= bound,
        tight: star_cross && star_size * star_size == bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn petersen_beta_values() {
        assert_eq!(beta(5, 2, 1).unwrap(), frac(-7, 1));
        assert_eq!(beta(5, 2, 2).unwrap(), frac(0, 1));
        assert_eq!(beta(5, 2, 3).unwrap(), frac(5, 3));
        assert_eq!(beta(5, 2, 4).unwrap(), frac(2, 1));
    }

    #[test]
    fn lower_bound_values() {
        assert_eq!(lower_bound_value(1).unwrap(), frac(1, 3));
        assert_eq!(lower_bound_value(2).unwrap(), frac(4, 5));
        assert_eq!(lower_bound_value(3).unwrap(), frac(15, 7));
    }

    #[test]
    fn boundary_edge_cases() {
        let g = KneserGraph::odd(2).unwrap();
        assert!(boundary(&g, &[]).unwrap().is_empty());
        let all: Vec<usize> = (0..10).collect();
        assert!(boundary(&g, &all).unwrap().is_empty());
        assert_eq!(boundary(&g, &[0]).unwrap(), g.neighbors(0));
    }

    #[test]
    fn small_diameters() {
        for k in 1..=3 {
            let d = verify_diameter(k).unwrap();
            assert!(d.holds, "{d:?}");
        }
    }

    #[test]
    fn beta_monotone_small_k() {
        for k in 1..=6 {
            assert!(verify_beta_monotone(k).unwrap().holds);
        }
    }
}
