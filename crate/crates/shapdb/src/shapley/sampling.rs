//! Monte-Carlo Shapley estimators with Hoeffding sample bounds.
//!
//! The additive estimator samples arrival orders and averages the target
//! player's marginal contribution; with `m = sample_size(ε, δ, range)`
//! samples the error exceeds ε with probability at most δ. The
//! multiplicative wrapper assumes the true value is either zero or at
//! least a known gap, runs the additive estimator at a tightened ε and
//! rounds small outputs down to exactly zero.
//!
//! Determinism: every estimate is driven by a dedicated ChaCha stream
//! selected by (seed, player id), so per-player estimates are independent
//! of each other and of how work is distributed across workers.

use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::shapley::{Coalition, CoalitionGame, PlayerId};

/// Guarantee parameters attached to an estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Guarantee {
    /// |estimate − value| ≤ epsilon with probability ≥ 1 − delta.
    Additive {
        epsilon: f64,
        delta: f64,
        range: f64,
    },
    /// value/(1+epsilon) ≤ estimate ≤ (1+epsilon)·value with probability
    /// ≥ 1 − delta, provided the true value is 0 or ≥ gap.
    Multiplicative {
        epsilon: f64,
        delta: f64,
        gap: f64,
        additive_epsilon: f64,
    },
}

/// A sampled Shapley value for one player.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub player: PlayerId,
    pub value: f64,
    pub samples: u64,
    pub seed: u64,
    pub guarantee: Guarantee,
}

/// Hoeffding sample count: ⌈(range² / 2ε²) · ln(2/δ)⌉.
pub fn sample_size(epsilon: f64, delta: f64, range: f64) -> Result<u64> {
    if !(epsilon > 0.0) {
        return Err(Error::Input(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Input(format!(
            "delta must lie in (0,1), got {delta}"
        )));
    }
    if !(range > 0.0) {
        return Err(Error::Input(format!("range must be positive, got {range}")));
    }
    let m = (range * range / (2.0 * epsilon * epsilon)) * (2.0 / delta).ln();
    Ok((m.ceil() as u64).max(1))
}

fn player_rng(seed: u64, player: PlayerId) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(player.wrapping_add(1));
    rng
}

/// Additive (ε, δ) estimate of one player's Shapley value. `range` must
/// bound the spread of the player's marginal contribution; 1 is correct
/// for monotone 0/1 games, 2 for arbitrary 0/1 games.
pub fn estimate_additive(
    game: &dyn CoalitionGame,
    player: PlayerId,
    epsilon: f64,
    delta: f64,
    range: f64,
    seed: u64,
) -> Result<Estimate> {
    let m = sample_size(epsilon, delta, range)?;
    let value = mean_marginal(game, player, m, seed)?;
    Ok(Estimate {
        player,
        value,
        samples: m,
        seed,
        guarantee: Guarantee::Additive {
            epsilon,
            delta,
            range,
        },
    })
}

fn mean_marginal(game: &dyn CoalitionGame, player: PlayerId, m: u64, seed: u64) -> Result<f64> {
    let n = game.player_count();
    let pos = game
        .position_of(player)
        .ok_or_else(|| Error::Input(format!("player {player} is not in the game")))?;
    let mut rng = player_rng(seed, player);
    let mut order: Vec<usize> = (0..n).collect();
    let mut sum = 0.0;
    for _ in 0..m {
        order.shuffle(&mut rng);
        let mut prefix = Coalition::empty(n);
        for &i in &order {
            if i == pos {
                break;
            }
            prefix.insert(i);
        }
        let before = game.utility(&prefix)?;
        prefix.insert(pos);
        let after = game.utility(&prefix)?;
        let marginal = (&after - &before)
            .to_f64()
            .ok_or_else(|| Error::Internal("marginal does not fit in f64".into()))?;
        sum += marginal;
    }
    Ok(sum / m as f64)
}

/// Multiplicative (1+ε, δ) estimate for a monotone player whose true value
/// is certified to be 0 or at least `gap`. Runs the additive estimator at
/// ε' = min(gap·ε/(1+ε), gap/2) and returns exactly 0 whenever the raw
/// mean falls below gap/2.
pub fn estimate_multiplicative(
    game: &dyn CoalitionGame,
    player: PlayerId,
    epsilon: f64,
    delta: f64,
    gap: f64,
    range: f64,
    seed: u64,
) -> Result<Estimate> {
    if !(gap > 0.0) {
        return Err(Error::Input(format!("gap must be positive, got {gap}")));
    }
    if !(epsilon > 0.0) {
        return Err(Error::Input(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let additive_epsilon = (gap * epsilon / (1.0 + epsilon)).min(gap / 2.0);
    let m = sample_size(additive_epsilon, delta, range)?;
    let raw = mean_marginal(game, player, m, seed)?;
    let value = if raw < gap / 2.0 { 0.0 } else { raw };
    Ok(Estimate {
        player,
        value,
        samples: m,
        seed,
        guarantee: Guarantee::Multiplicative {
            epsilon,
            delta,
            gap,
            additive_epsilon,
        },
    })
}
