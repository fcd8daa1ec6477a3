//! Game-agnostic Shapley computation.
//!
//! A [`CoalitionGame`] is an ordered list of players plus a pure utility
//! oracle over coalitions. Two exact engines (permutation enumeration and
//! subset-coefficient summation) work in arbitrary-precision rationals;
//! the Monte-Carlo estimators in [`sampling`] trade exactness for
//! Hoeffding-style (ε, δ) guarantees.
//!
//! Utilities must satisfy the wealth convention `utility(∅) = 0`; the
//! engines rely on it only through the efficiency identity, which callers
//! can (and the tests do) check against the reported values.

mod exact;
mod sampling;

pub use exact::{shapley_exact_permutations, shapley_exact_subsets};
pub use sampling::{estimate_additive, estimate_multiplicative, sample_size, Estimate, Guarantee};

use num_rational::BigRational;

use crate::error::Result;

/// Opaque player identifier; attribution layers map these to fact ids.
pub type PlayerId = u64;

/// Default player cap for the permutation engine (|L|! blowup).
pub const DEFAULT_PERMUTATION_CAP: usize = 9;
/// Default player cap for the subset engine (2^|L| blowup).
pub const DEFAULT_SUBSET_CAP: usize = 20;

/// A coalition: a set of player positions 0..n-1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Coalition {
    words: Vec<u64>,
    len: usize,
}

impl Coalition {
    pub fn empty(player_count: usize) -> Self {
        Coalition {
            words: vec![0; player_count.div_ceil(64)],
            len: 0,
        }
    }

    pub fn from_indices(player_count: usize, members: &[usize]) -> Self {
        let mut c = Coalition::empty(player_count);
        for &i in members {
            c.insert(i);
        }
        c
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words
            .get(i / 64)
            .is_some_and(|w| w & (1u64 << (i % 64)) != 0)
    }

    pub fn insert(&mut self, i: usize) {
        let w = &mut self.words[i / 64];
        let bit = 1u64 << (i % 64);
        if *w & bit == 0 {
            *w |= bit;
            self.len += 1;
        }
    }

    pub fn remove(&mut self, i: usize) {
        let w = &mut self.words[i / 64];
        let bit = 1u64 << (i % 64);
        if *w & bit != 0 {
            *w &= !bit;
            self.len -= 1;
        }
    }

    /// Number of members.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Member positions, ascending.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }
}

/// A cooperative game: an ordered player list and a deterministic utility
/// oracle over coalitions (given as sets of positions into that list).
///
/// Oracles must be pure — the engines may evaluate coalitions in any order
/// and cache results. The `Result` return lets budget-limited utilities
/// abort cleanly instead of degrading.
pub trait CoalitionGame {
    fn players(&self) -> &[PlayerId];

    fn utility(&self, coalition: &Coalition) -> Result<BigRational>;

    fn player_count(&self) -> usize {
        self.players().len()
    }

    /// Position of a player id in the player list.
    fn position_of(&self, player: PlayerId) -> Option<usize> {
        self.players().iter().position(|&p| p == player)
    }
}

/// A game defined by a closure; handy for tests, examples and ad-hoc games.
pub struct FnGame<F> {
    players: Vec<PlayerId>,
    utility: F,
}

impl<F> FnGame<F>
where
    F: Fn(&Coalition) -> BigRational,
{
    pub fn new(players: Vec<PlayerId>, utility: F) -> Self {
        FnGame { players, utility }
    }

    /// Players 0..n-1.
    pub fn with_player_count(n: usize, utility: F) -> Self {
        FnGame::new((0..n as PlayerId).collect(), utility)
    }
}

impl<F> CoalitionGame for FnGame<F>
where
    F: Fn(&Coalition) -> BigRational,
{
    fn players(&self) -> &[PlayerId] {
        &self.players
    }

    fn utility(&self, coalition: &Coalition) -> Result<BigRational> {
        Ok((self.utility)(coalition))
    }
}

/// Which engine produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineKind {
    ExactPermutations,
    ExactSubsets,
    HierarchicalDp,
    ClosedForm,
    SampleAdditive,
    SampleMultiplicative,
    /// The game is constant zero and no engine had to run (e.g. the
    /// exogenous part alone satisfies the query).
    TrivialZero,
}

impl EngineKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EngineKind::ExactPermutations => "exact-permutations",
            EngineKind::ExactSubsets => "exact-subsets",
            EngineKind::HierarchicalDp => "hierarchical-dp",
            EngineKind::ClosedForm => "closed-form",
            EngineKind::SampleAdditive => "sample-additive",
            EngineKind::SampleMultiplicative => "sample-multiplicative",
            EngineKind::TrivialZero => "trivial-zero",
        }
    }
}

impl std::fmt::Display for EngineKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A computed attribution value: exact rational or sampled estimate.
#[derive(Debug, Clone, PartialEq)]
pub enum Valuation {
    Exact(BigRational),
    Estimate(Estimate),
}

impl Valuation {
    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            Valuation::Exact(v) => Some(v),
            Valuation::Estimate(_) => None,
        }
    }
}

/// Exact Shapley values for every player of a game, in player order.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapleyVector {
    pub engine: EngineKind,
    pub entries: Vec<(PlayerId, BigRational)>,
}

impl ShapleyVector {
    pub fn value_of(&self, player: PlayerId) -> Option<&BigRational> {
        self.entries
            .iter()
            .find(|(p, _)| *p == player)
            .map(|(_, v)| v)
    }

    /// Sum of all entries; equals `utility(L) - utility(∅)` by efficiency.
    pub fn total(&self) -> BigRational {
        let mut sum = BigRational::from_integer(0.into());
        for (_, v) in &self.entries {
            sum += v;
        }
        sum
    }
}
