//! Seeded random instances for property tests and experiments.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Valuation;
use crate::error::{Error, Result};
use crate::rational::{int, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    /// Independent additive valuations with per-good values in `1..=9`.
    Additive,
    /// One monotone table shared by every player; increments in `0..=3`.
    IdenticalTableMonotone,
    /// One shared table with increments in `1..=3` (nonzero marginal utility).
    IdenticalTableStrict,
    /// Independent monotone tables, one per player.
    DistinctTableMonotone,
    /// Additive valuations that agree on the ranking of single goods.
    IdenticalRankingAdditive,
    /// `v(S) = min(B, Σ_{g∈S} w_g)` per player, stored as a table.
    BudgetAdditive,
}

/// Deterministic per `(kind, m, n, seed)`.
pub fn generate_random(kind: GeneratorKind, m: usize, n: usize, seed: u64) -> Result<Vec<Valuation>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        GeneratorKind::Additive => (0..n)
            .map(|_| Valuation::additive((0..m).map(|_| int(rng.gen_range(1..=9))).collect()))
            .collect(),
        GeneratorKind::IdenticalTableMonotone => {
            let v = monotone_table(m, 0, &mut rng)?;
            Ok(vec![v; n])
        }
        GeneratorKind::IdenticalTableStrict => {
            let v = monotone_table(m, 1, &mut rng)?;
            Ok(vec![v; n])
        }
        GeneratorKind::DistinctTableMonotone => (0..n).map(|_| monotone_table(m, 0, &mut rng)).collect(),
        GeneratorKind::IdenticalRankingAdditive => identical_ranking(m, n, &mut rng),
        GeneratorKind::BudgetAdditive => (0..n).map(|_| budget_additive(m, &mut rng)).collect(),
    }
}

/// Walks a random linear extension of the subset lattice (size first, random
/// order within a size) and gives every set a random increment over the
/// largest value among its immediate subsets.
fn monotone_table(m: usize, min_increment: i64, rng: &mut ChaCha8Rng) -> Result<Valuation> {
    if m > super::DEFAULT_TABLE_MAX_GOODS {
        return Err(Error::Capacity {
            what: "random table valuation".into(),
            needed: 1u128 << m,
            limit: 1u128 << super::DEFAULT_TABLE_MAX_GOODS,
        });
    }
    let mut order: Vec<(u32, u64, usize)> = (1..1usize << m).map(|s| (s.count_ones(), rng.gen(), s)).collect();
    order.sort_unstable();
    let mut entries = vec![Rational::default(); 1 << m];
    for &(_, _, s) in &order {
        let floor = (0..m)
            .filter(|g| s >> g & 1 == 1)
            .map(|g| &entries[s & !(1 << g)])
            .max()
            .cloned()
            .unwrap_or_default();
        entries[s] = floor + int(rng.gen_range(min_increment..=3));
    }
    Valuation::table(m, entries)
}

fn identical_ranking(m: usize, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Valuation>> {
    // ranking[r] is the good with rank r (rank 0 = least valuable).
    let mut ranking: Vec<usize> = (0..m).collect();
    ranking.shuffle(rng);
    // A rank shares its value with the previous rank with probability 1/5.
    let tied: Vec<bool> = (0..m).map(|r| r > 0 && rng.gen_ratio(1, 5)).collect();
    (0..n)
        .map(|_| {
            let mut values = vec![Rational::default(); m];
            let mut level = 0i64;
            for (r, &g) in ranking.iter().enumerate() {
                if !tied[r] {
                    level += rng.gen_range(1..=5);
                }
                values[g] = int(level);
            }
            Valuation::additive(values)
        })
        .collect()
}

fn budget_additive(m: usize, rng: &mut ChaCha8Rng) -> Result<Valuation> {
    let weights: Vec<i64> = (0..m).map(|_| rng.gen_range(1..=10)).collect();
    let total: i64 = weights.iter().sum();
    let budget = rng.gen_range(1..=total.max(1));
    Valuation::table_from_fn(m, |s| {
        let sum: i64 = s.iter().map(|g| weights[g]).sum();
        int(sum.min(budget))
    })
}
