//! Exact Shapley engines.
//!
//! Both engines compute the same vector; they differ in how they traverse
//! the game. The permutation engine averages marginal contributions over
//! every arrival order. The subset engine sums over coalitions weighted by
//! |S|! (n−|S|−1)! / n!, which is the same sum with permutations grouped
//! by the set of predecessors. Keeping both routes independent gives a
//! cheap cross-check that the tests lean on heavily.

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::shapley::{Coalition, CoalitionGame, EngineKind, ShapleyVector};

fn check_cap(engine: &'static str, players: usize, cap: usize) -> Result<()> {
    if players > cap {
        return Err(Error::CapExceeded {
            engine,
            players,
            cap,
        });
    }
    Ok(())
}

fn factorials(n: usize) -> Vec<BigInt> {
    let mut f = Vec::with_capacity(n + 1);
    f.push(BigInt::from(1));
    for k in 1..=n {
        let next = &f[k - 1] * BigInt::from(k);
        f.push(next);
    }
    f
}

/// Shapley values by enumeration of all player permutations. The utility
/// of each distinct prefix coalition is computed once and cached.
pub fn shapley_exact_permutations(game: &dyn CoalitionGame, cap: usize) -> Result<ShapleyVector> {
    let n = game.player_count();
    check_cap("exact-permutations", n, cap)?;
    if n == 0 {
        return Ok(ShapleyVector {
            engine: EngineKind::ExactPermutations,
            entries: Vec::new(),
        });
    }

    // utility cache indexed by coalition bitmask (n <= cap <= 24 in practice)
    let mut cache: Vec<Option<BigRational>> = vec![None; 1usize << n];
    let mut utility_of = |mask: usize, game: &dyn CoalitionGame| -> Result<BigRational> {
        if cache[mask].is_none() {
            let members: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let c = Coalition::from_indices(n, &members);
            cache[mask] = Some(game.utility(&c)?);
        }
        Ok(cache[mask].clone().unwrap())
    };

    let mut sums: Vec<BigRational> = vec![BigRational::zero(); n];
    for perm in (0..n).permutations(n) {
        let mut mask = 0usize;
        let mut prev = utility_of(0, game)?;
        for i in perm {
            mask |= 1 << i;
            let next = utility_of(mask, game)?;
            sums[i] += &next - &prev;
            prev = next;
        }
    }

    let total = BigRational::from_integer(factorials(n)[n].clone());
    let entries = game
        .players()
        .iter()
        .zip(sums)
        .map(|(&p, s)| (p, s / &total))
        .collect();
    Ok(ShapleyVector {
        engine: EngineKind::ExactPermutations,
        entries,
    })
}

/// Shapley values by the subset-coefficient sum. Coalitions are visited by
/// increasing cardinality and, within a cardinality, in lexicographic order
/// of player positions, so callers can cache utilities incrementally; each
/// coalition's utility is requested exactly once.
pub fn shapley_exact_subsets(game: &dyn CoalitionGame, cap: usize) -> Result<ShapleyVector> {
    let n = game.player_count();
    check_cap("exact-subsets", n, cap)?;
    if n == 0 {
        return Ok(ShapleyVector {
            engine: EngineKind::ExactSubsets,
            entries: Vec::new(),
        });
    }

    // with[i][k] = sum of utilities over coalitions of size k containing i;
    // total[k] = sum over all coalitions of size k.
    let mut with: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); n + 1]; n];
    let mut total: Vec<BigRational> = vec![BigRational::zero(); n + 1];
    for k in 0..=n {
        for members in (0..n).combinations(k) {
            let u = game.utility(&Coalition::from_indices(n, &members))?;
            total[k] += &u;
            for &i in &members {
                with[i][k] += &u;
            }
        }
    }

    // value(i) = sum_k  k!(n-k-1)!/n!  * (with[i][k+1] + with[i][k] - total[k])
    let fact = factorials(n);
    let coeff: Vec<BigRational> = (0..n)
        .map(|k| BigRational::new(&fact[k] * &fact[n - k - 1], fact[n].clone()))
        .collect();
    let entries = game
        .players()
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let mut v = BigRational::zero();
            for (k, c) in coeff.iter().enumerate() {
                let slack = &with[i][k + 1] + &with[i][k] - &total[k];
                if !slack.is_zero() {
                    v += c * slack;
                }
            }
            (p, v)
        })
        .collect();
    Ok(ShapleyVector {
        engine: EngineKind::ExactSubsets,
        entries,
    })
}
