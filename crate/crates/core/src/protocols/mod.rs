//! Allocation protocols with EFX-type guarantees, plus the maximum Nash
//! welfare solver used as a baseline.

mod half_efx;
mod identical;
mod nash;
mod same_ranking;
mod two_player;

pub use half_efx::{half_efx, HalfEfxRound, HalfEfxTrace};
pub use identical::efx_po_additive_identical;
pub use nash::max_nash_welfare;
pub use same_ranking::{same_ranking_efx, same_ranking_efx_with_snapshots, shared_ranking};
pub use two_player::{cut_and_choose, two_player_additive_efx};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::valuation::ValueOracle;

/// Per-good values of every valuation, or a precondition error naming the
/// first non-additive player.
pub(crate) fn additive_rows<'a, V: ValueOracle>(valuations: &'a [V], what: &str) -> Result<Vec<&'a [Rational]>> {
    valuations
        .iter()
        .enumerate()
        .map(|(i, v)| {
            v.additive_values().ok_or_else(|| {
                Error::Precondition(format!("{what} needs additive valuations; player {i} is not additive"))
            })
        })
        .collect()
}

/// Every solver reachable by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Leximin,
    LeximinPlusPlus,
    MaxNashWelfare,
    CutAndChoose,
    HalfEfx,
    SameRanking,
    TwoPlayerAdditive,
    EfxPoIdentical,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::Leximin,
        Algorithm::LeximinPlusPlus,
        Algorithm::MaxNashWelfare,
        Algorithm::CutAndChoose,
        Algorithm::HalfEfx,
        Algorithm::SameRanking,
        Algorithm::TwoPlayerAdditive,
        Algorithm::EfxPoIdentical,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Leximin => "leximin",
            Algorithm::LeximinPlusPlus => "leximin++",
            Algorithm::MaxNashWelfare => "mnw",
            Algorithm::CutAndChoose => "cut-and-choose",
            Algorithm::HalfEfx => "half-efx",
            Algorithm::SameRanking => "same-ranking",
            Algorithm::TwoPlayerAdditive => "two-player-additive",
            Algorithm::EfxPoIdentical => "efx-po-identical",
        }
    }

    /// Whether the `normalize` argument of [`run_algorithm`] has any effect.
    pub fn uses_normalization(self) -> bool {
        matches!(self, Algorithm::Leximin | Algorithm::LeximinPlusPlus)
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::usage(format!("unknown algorithm {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgorithmOutput {
    pub allocation: crate::allocation::Allocation,
    /// Present for [`Algorithm::HalfEfx`].
    pub trace: Option<HalfEfxTrace>,
}

/// Dispatches to the named solver. `normalize` applies to the leximin variants only.
pub fn run_algorithm(
    algorithm: Algorithm,
    valuations: &[crate::valuation::Valuation],
    normalize: bool,
    cfg: &crate::allocation::SearchConfig,
) -> Result<AlgorithmOutput> {
    use crate::leximin::{solve, ComparatorKind};
    let two = || -> Result<()> {
        if valuations.len() != 2 {
            return Err(Error::usage(format!(
                "{algorithm} needs exactly 2 players, got {}",
                valuations.len()
            )));
        }
        Ok(())
    };
    let plain = |allocation| {
        Ok(AlgorithmOutput {
            allocation,
            trace: None,
        })
    };
    match algorithm {
        Algorithm::Leximin => plain(solve(valuations, ComparatorKind::Leximin, normalize, cfg)?),
        Algorithm::LeximinPlusPlus => plain(solve(valuations, ComparatorKind::LeximinPlusPlus, normalize, cfg)?),
        Algorithm::MaxNashWelfare => plain(max_nash_welfare(valuations, cfg)?),
        Algorithm::CutAndChoose => {
            two()?;
            plain(cut_and_choose(&valuations[0], &valuations[1], cfg)?)
        }
        Algorithm::TwoPlayerAdditive => {
            two()?;
            plain(two_player_additive_efx(&valuations[0], &valuations[1])?)
        }
        Algorithm::SameRanking => plain(same_ranking_efx(valuations)?),
        Algorithm::HalfEfx => {
            let (allocation, trace) = half_efx(valuations)?;
            Ok(AlgorithmOutput {
                allocation,
                trace: Some(trace),
            })
        }
        Algorithm::EfxPoIdentical => {
            if valuations.is_empty() {
                return Err(Error::usage("at least one player is required"));
            }
            if !crate::valuation::all_identical(valuations) {
                return Err(Error::Precondition(format!(
                    "{algorithm} needs every player to share one valuation"
                )));
            }
            plain(efx_po_additive_identical(&valuations[0], valuations.len(), cfg)?)
        }
    }
}
