//! Kneser graphs, local search over them, and the two-player valuation
//! whose EFX allocations are exactly the local maxima of a score oracle.
//!
//! Vertices of `K(n, k)` are the `k`-subsets of `0..n`, stored as bitmasks
//! and ranked in colex order (which coincides with ascending mask order).
//! Two vertices are adjacent iff they are disjoint.

mod verify;

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::goods::MAX_GOODS;
use crate::rational::Rational;
use crate::valuation::Valuation;

pub use verify::{
    beta, boundary, lower_bound_value, verify_beta_monotone, verify_boundary_bound, verify_correspondence,
    verify_cross_intersecting, verify_diameter, BetaCheck, BetaReport, BoundaryReport, BoundarySampling,
    CorrespondenceReport, CrossIntersectingReport, DiameterReport,
};

/// Largest vertex count a [`KneserGraph`] will materialize.
pub const MAX_VERTICES: u128 = 4_000_000;

/// `C(n, k)`, or `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) after the multiplication.
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// Position of a `k`-subset among all `k`-subsets in colex order.
pub fn colex_rank(mask: u128) -> usize {
    let mut rank: u128 = 0;
    let mut i = 0u64;
    let mut rest = mask;
    while rest != 0 {
        let c = rest.trailing_zeros() as u64;
        i += 1;
        rank += binomial(c, i).expect("rank fits");
        rest &= rest - 1;
    }
    rank as usize
}

/// Next mask with the same popcount (Gosper's hack); `None` past bit 127.
fn next_same_popcount(x: u128) -> Option<u128> {
    let c = x & x.wrapping_neg();
    let (r, overflow) = x.overflowing_add(c);
    if overflow || r == 0 {
        return None;
    }
    Some((((r ^ x) >> 2) / c) | r)
}

/// All `k`-subsets of the bits of `pool`, ascending.
fn subsets_of(pool: u128, k: usize) -> Vec<u128> {
    let positions: Vec<u32> = (0..128).filter(|b| pool >> b & 1 == 1).collect();
    let p = positions.len();
    if k > p {
        return Vec::new();
    }
    if k == 0 {
        return vec![0];
    }
    let mut out = Vec::new();
    let limit = if p == 128 { u128::MAX } else { (1u128 << p) - 1 };
    let mut x: u128 = if k == 128 { u128::MAX } else { (1u128 << k) - 1 };
    loop {
        let mut mask = 0u128;
        let mut rest = x;
        while rest != 0 {
            mask |= 1u128 << positions[rest.trailing_zeros() as usize];
            rest &= rest - 1;
        }
        out.push(mask);
        match next_same_popcount(x) {
            Some(next) if next <= limit => x = next,
            _ => return out,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KneserGraph {
    n: usize,
    k: usize,
    vertices: Vec<u128>,
}

impl KneserGraph {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n > MAX_GOODS || k > n {
            return Err(Error::usage(format!("K({n}, {k}) needs 0 <= k <= n <= {MAX_GOODS}")));
        }
        let count = binomial(n as u64, k as u64).unwrap_or(u128::MAX);
        if count > MAX_VERTICES {
            return Err(Error::Capacity {
                what: format!("K({n}, {k}) vertices"),
                needed: count,
                limit: MAX_VERTICES,
            });
        }
        let full = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
        Ok(KneserGraph {
            n,
            k,
            vertices: subsets_of(full, k),
        })
    }

    /// The odd graph `K(2k + 1, k)`.
    pub fn odd(k: usize) -> Result<Self> {
        Self::new(2 * k + 1, k)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex(&self, rank: usize) -> u128 {
        self.vertices[rank]
    }

    pub fn vertex_elements(&self, rank: usize) -> Vec<usize> {
        (0..self.n).filter(|&e| self.vertices[rank] >> e & 1 == 1).collect()
    }

    pub fn vertices(&self) -> &[u128] {
        &self.vertices
    }

    /// Rank of a vertex mask, or `None` when `mask` is not a `k`-subset of `0..n`.
    pub fn rank_of(&self, mask: u128) -> Option<usize> {
        let inside = self.n == 128 || mask >> self.n == 0;
        (inside && mask.count_ones() as usize == self.k).then(|| colex_rank(mask))
    }

    /// Rank of the vertex with the given elements.
    pub fn rank_of_elements(&self, elements: &[usize]) -> Result<usize> {
        let mut mask = 0u128;
        for &e in elements {
            if e >= self.n || mask >> e & 1 == 1 {
                return Err(Error::usage(format!(
                    "{elements:?} is not a {}-subset of 0..{}",
                    self.k, self.n
                )));
            }
            mask |= 1 << e;
        }
        self.rank_of(mask)
            .ok_or_else(|| Error::usage(format!("{elements:?} is not a {}-subset of 0..{}", self.k, self.n)))
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.vertices[a] & self.vertices[b] == 0
    }

    /// Ranks of all vertices disjoint from `rank`, ascending.
    pub fn neighbors(&self, rank: usize) -> Vec<usize> {
        let full = if self.n == 128 {
            u128::MAX
        } else {
            (1u128 << self.n) - 1
        };
        let v = self.vertices[rank];
        let mut out: Vec<usize> = subsets_of(full & !v, self.k)
            .into_iter()
            .filter(|&w| w != v)
            .map(colex_rank)
            .collect();
        out.sort_unstable();
        out
    }

    pub fn degree(&self, rank: usize) -> usize {
        self.neighbors(rank).len()
    }
}

/// `δ(S) = −1/(2 + f(S))`: strictly increasing in the score, inside `(−1, 0)`.
pub fn delta(score: u64) -> Rational {
    Rational::new(BigInt::from(-1), BigInt::from(score) + 2)
}

/// Non-negative integer scores on the vertices of `K(n, k)`, with query counters.
#[derive(Debug)]
pub struct ScoreOracle {
    n: usize,
    k: usize,
    scores: Vec<u64>,
    total: AtomicU64,
    distinct: AtomicU64,
    seen: Vec<AtomicBool>,
}

impl ScoreOracle {
    /// `scores[r]` is the score of the vertex of colex rank `r`.
    pub fn new(n: usize, k: usize, scores: Vec<u64>) -> Result<Self> {
        let count = binomial(n as u64, k as u64).unwrap_or(u128::MAX);
        if count > MAX_VERTICES || n > MAX_GOODS {
            return Err(Error::Capacity {
                what: format!("K({n}, {k}) scores"),
                needed: count,
                limit: MAX_VERTICES,
            });
        }
        if scores.len() as u128 != count {
            return Err(Error::usage(format!(
                "K({n}, {k}) has {count} vertices, got {} scores",
                scores.len()
            )));
        }
        let seen = scores.iter().map(|_| AtomicBool::new(false)).collect();
        Ok(ScoreOracle {
            n,
            k,
            scores,
            total: AtomicU64::new(0),
            distinct: AtomicU64::new(0),
            seen,
        })
    }

    pub fn constant(n: usize, k: usize, score: u64) -> Result<Self> {
        let count = binomial(n as u64, k as u64).unwrap_or(u128::MAX).min(MAX_VERTICES + 1);
        Self::new(n, k, vec![score; count as usize])
    }

    /// Score 1 at `vertex`, 0 elsewhere.
    pub fn indicator(n: usize, k: usize, vertex: usize) -> Result<Self> {
        let mut o = Self::constant(n, k, 0)?;
        if vertex >= o.scores.len() {
            return Err(Error::usage(format!("vertex rank {vertex} out of range")));
        }
        o.scores[vertex] = 1;
        Ok(o)
    }

    pub fn from_fn(graph: &KneserGraph, f: impl FnMut(u128) -> u64) -> Result<Self> {
        Self::new(graph.n, graph.k, graph.vertices.iter().copied().map(f).collect())
    }

    /// Scores drawn uniformly from `0..=max_score`.
    pub fn random(n: usize, k: usize, max_score: u64, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let count = binomial(n as u64, k as u64).unwrap_or(u128::MAX).min(MAX_VERTICES + 1);
        Self::new(n, k, (0..count).map(|_| rng.gen_range(0..=max_score)).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Counted query by colex rank.
    pub fn query(&self, rank: usize) -> u64 {
        self.total.fetch_add(1, Ordering::Relaxed);
        if !self.seen[rank].swap(true, Ordering::Relaxed) {
            self.distinct.fetch_add(1, Ordering::Relaxed);
        }
        self.scores[rank]
    }

    /// Counted query by vertex mask. `mask` must be a `k`-subset of `0..n`.
    pub fn query_mask(&self, mask: u128) -> u64 {
        assert_eq!(
            mask.count_ones() as usize,
            self.k,
            "score oracle queried off the k-subsets"
        );
        self.query(colex_rank(mask))
    }

    /// Uncounted read, for checks that should not disturb the counters.
    pub fn peek(&self, rank: usize) -> u64 {
        self.scores[rank]
    }

    pub fn scores(&self) -> &[u64] {
        &self.scores
    }

    pub fn total_queries(&self) -> u64 {
        self.total.load(Ordering::Relaxed)
    }

    pub fn distinct_queries(&self) -> u64 {
        self.distinct.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.total.store(0, Ordering::Relaxed);
        self.distinct.store(0, Ordering::Relaxed);
        for s in &self.seen {
            s.store(false, Ordering::Relaxed);
        }
    }

    fn check_graph(&self, g: &KneserGraph) -> Result<()> {
        if g.n != self.n || g.k != self.k {
            return Err(Error::usage(format!(
                "oracle is over K({}, {}) but the graph is K({}, {})",
                self.n, self.k, g.n, g.k
            )));
        }
        Ok(())
    }
}

/// The valuation over `2k + 1` goods:
/// `2|S|` below size `k`, `2k + δ(S)` at size `k`, `2k` above.
pub fn build_reduction_valuation(k: usize, f: Arc<ScoreOracle>) -> Result<Valuation> {
    Valuation::kneser(k, f)
}

/// No neighbor scores strictly higher than `a`. Queries `a` and every neighbor.
pub fn is_local_max(g: &KneserGraph, f: &ScoreOracle, a: usize) -> Result<bool> {
    f.check_graph(g)?;
    if a >= g.vertex_count() {
        return Err(Error::usage(format!("vertex rank {a} out of range")));
    }
    let here = f.query(a);
    let neighbors = g.neighbors(a);
    let mut ok = true;
    for b in neighbors {
        ok &= f.query(b) <= here;
    }
    Ok(ok)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalSearchStart {
    /// The vertex of rank 0.
    Canonical,
    Vertex(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalSearchResult {
    pub local_max: usize,
    pub elements: Vec<usize>,
    pub score: u64,
    pub steps: usize,
    /// Oracle queries issued during this run.
    pub total_queries: u64,
    /// Growth of the oracle's distinct-query counter during this run.
    pub distinct_queries: u64,
}

/// Steepest ascent: move to the highest-scoring neighbor (lowest rank on
/// ties) while it beats the current vertex. Each vertex is queried at most once.
pub fn run_local_search(g: &KneserGraph, f: &ScoreOracle, start: LocalSearchStart) -> Result<LocalSearchResult> {
    f.check_graph(g)?;
    let mut current = match start {
        LocalSearchStart::Canonical => 0,
        LocalSearchStart::Vertex(v) if v < g.vertex_count() => v,
        LocalSearchStart::Vertex(v) => return Err(Error::usage(format!("vertex rank {v} out of range"))),
    };
    if g.vertex_count() == 0 {
        return Err(Error::usage("graph has no vertices"));
    }
    let (total0, distinct0) = (f.total_queries(), f.distinct_queries());
    let mut memo: HashMap<usize, u64> = HashMap::new();
    let mut score = |v: usize| *memo.entry(v).or_insert_with(|| f.query(v));
    let mut steps = 0;
    loop {
        let here = score(current);
        let mut best: Option<(usize, u64)> = None;
        for b in g.neighbors(current) {
            let s = score(b);
            if best.is_none_or(|(_, t)| s > t) {
                best = Some((b, s));
            }
        }
        match best {
            Some((b, s)) if s > here => {
                current = b;
                steps += 1;
            }
            _ => {
                return Ok(LocalSearchResult {
                    local_max: current,
                    elements: g.vertex_elements(current),
                    score: here,
                    steps,
                    total_queries: f.total_queries() - total0,
                    distinct_queries: f.distinct_queries() - distinct0,
                })
            }
        }
    }
}
