//! Canonical enumeration of complete allocations.
//!
//! Allocation number `x` is the base-`n` numeral `d_{m-1} … d_0` where digit
//! `d_g` names the player receiving good `g`; allocations are visited in
//! ascending numeral order.

use std::ops::Range;

use rayon::prelude::*;

use super::Allocation;
use crate::error::{Error, Result};

/// Default budget for exhaustive scans over `n^m` allocations.
pub const DEFAULT_MAX_STATES: u128 = 20_000_000;

/// Budget and parallelism for enumeration-backed computations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub max_states: u128,
    /// Worker threads; `0` or `1` scans sequentially. Results never depend on it.
    pub jobs: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_states: DEFAULT_MAX_STATES,
            jobs: 1,
        }
    }
}

impl SearchConfig {
    pub fn with_jobs(self, jobs: usize) -> Self {
        SearchConfig { jobs, ..self }
    }
}

/// `n^m`, or `None` on overflow.
pub fn allocation_count(n: usize, m: usize) -> Option<u128> {
    (n as u128).checked_pow(m as u32)
}

pub(crate) fn check_capacity(n: usize, m: usize, cfg: &SearchConfig, what: &str) -> Result<u64> {
    if n == 0 {
        return Err(Error::usage("at least one player is required"));
    }
    let count = allocation_count(n, m).unwrap_or(u128::MAX);
    if count > cfg.max_states || count > u64::MAX as u128 {
        return Err(Error::Capacity {
            what: what.to_string(),
            needed: count,
            limit: cfg.max_states,
        });
    }
    Ok(count as u64)
}

/// Streams every complete allocation of `m` goods to `n` players exactly once.
pub fn enumerate_allocations(n: usize, m: usize, cfg: &SearchConfig) -> Result<AllocationIter> {
    let total = check_capacity(n, m, cfg, "allocation enumeration")?;
    Ok(AllocationIter {
        odometer: Odometer::new(n, m, 0..total),
        started: false,
    })
}

/// Allocation number `index` in canonical order.
pub fn decode_allocation(index: u128, n: usize, m: usize) -> Result<Allocation> {
    if n == 0 {
        return Err(Error::usage("at least one player is required"));
    }
    if allocation_count(n, m).is_some_and(|c| index >= c) {
        return Err(Error::usage(format!(
            "index {index} out of range for {n}^{m} allocations"
        )));
    }
    let mut masks = vec![0u128; n];
    let mut rest = index;
    for g in 0..m {
        masks[(rest % n as u128) as usize] |= 1 << g;
        rest /= n as u128;
    }
    Ok(Allocation::from_masks(&masks, m))
}

pub struct AllocationIter {
    odometer: Odometer,
    started: bool,
}

impl Iterator for AllocationIter {
    type Item = Allocation;

    fn next(&mut self) -> Option<Allocation> {
        if self.started {
            if !self.odometer.advance() {
                return None;
            }
        } else {
            self.started = true;
            if self.odometer.is_empty() {
                return None;
            }
        }
        Some(Allocation::from_masks(self.odometer.masks(), self.odometer.m))
    }
}

/// Walks a range of canonical indices, keeping the bundle masks current.
pub(crate) struct Odometer {
    n: usize,
    pub(crate) m: usize,
    digits: Vec<usize>,
    masks: Vec<u128>,
    index: u64,
    end: u64,
}

impl Odometer {
    pub(crate) fn new(n: usize, m: usize, range: Range<u64>) -> Self {
        let mut digits = vec![0usize; m];
        let mut masks = vec![0u128; n];
        let mut rest = range.start;
        for (g, d) in digits.iter_mut().enumerate() {
            *d = (rest % n as u64) as usize;
            rest /= n as u64;
            masks[*d] |= 1 << g;
        }
        Odometer {
            n,
            m,
            digits,
            masks,
            index: range.start,
            end: range.end,
        }
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.index >= self.end
    }

    pub(crate) fn masks(&self) -> &[u128] {
        &self.masks
    }

    /// Moves to the next index; false once the range is exhausted.
    pub(crate) fn advance(&mut self) -> bool {
        self.index += 1;
        if self.index >= self.end {
            return false;
        }
        for g in 0..self.m {
            let d = self.digits[g];
            self.masks[d] &= !(1 << g);
            if d + 1 < self.n {
                self.digits[g] = d + 1;
                self.masks[d + 1] |= 1 << g;
                return true;
            }
            self.digits[g] = 0;
            self.masks[0] |= 1 << g;
        }
        true
    }
}

/// Splits `0..total` into contiguous ranges, runs `f` on each (in parallel
/// when `cfg.jobs > 1`) and returns the results in range order.
pub(crate) fn scan_chunks<T, F>(total: u64, cfg: &SearchConfig, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<u64>) -> T + Sync + Send,
{
    if cfg.jobs <= 1 || total < 4096 {
        return vec![f(0..total)];
    }
    let pieces = (cfg.jobs as u64 * 4).min(total);
    let step = total.div_ceil(pieces);
    let ranges: Vec<Range<u64>> = (0..pieces)
        .map(|p| p * step..((p + 1) * step).min(total))
        .filter(|r| !r.is_empty())
        .collect();
    match rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs).build() {
        Ok(pool) => pool.install(|| ranges.into_par_iter().map(&f).collect()),
        Err(_) => ranges.into_iter().map(f).collect(),
    }
}
