//! Exact fair division of indivisible goods.
//!
//! Valuations return exact rationals, so every envy comparison is decided
//! without rounding. The crate provides:
//!
//! * [`valuation`]: additive, table and oracle-backed valuations, class
//!   checks (monotone, submodular, subadditive, nonzero marginals) and
//!   seeded generators;
//! * [`allocation`]: allocations, their canonical enumeration, envy graphs
//!   with cycle elimination, and the EF / EF1 / EFX / c-EFX / Pareto checks;
//! * [`leximin`]: the leximin and leximin++ orderings and exhaustive solvers;
//! * [`protocols`]: cut-and-choose, the 1/2-EFX envy-cycle procedure, the
//!   identical-ranking procedure, the identical-additive EFX+PO construction
//!   and maximum Nash welfare;
//! * [`kneserlab`]: Kneser graphs, local search, and the reduction from local
//!   maxima to EFX allocations;
//! * [`instance`] and [`fixtures`]: JSON files and the worked examples.
//!
//! Players and goods are 0-based everywhere.

pub mod allocation;
pub mod error;
pub mod fixtures;
pub mod goods;
pub mod instance;
pub mod kneserlab;
pub mod leximin;
pub mod protocols;
pub mod rational;
pub mod valuation;

pub use error::{Error, Result};
