//! The Shapley kernel on a user-defined cooperative game.
//!
//! A right-hand glove (player 0) is worth nothing alone; paired with
//! either left-hand glove (players 1, 2) the coalition earns 1.
//!
//!     cargo run --example custom_game

use num_rational::BigRational;
use num_traits::{One, Zero};

use shapdb::shapley::{
    estimate_additive, shapley_exact_permutations, shapley_exact_subsets, FnGame,
};

fn main() {
    let game = FnGame::with_player_count(3, |c| {
        let right = c.contains(0);
        let lefts = usize::from(c.contains(1)) + usize::from(c.contains(2));
        if right && lefts > 0 {
            BigRational::one()
        } else {
            BigRational::zero()
        }
    });

    let perm = shapley_exact_permutations(&game, 9).unwrap();
    let sub = shapley_exact_subsets(&game, 20).unwrap();
    assert_eq!(perm.entries, sub.entries);

    println!("glove game (one right glove, two left gloves):");
    for (player, value) in &perm.entries {
        println!("  player {player}: {value}");
    }
    println!("  total: {} (the grand coalition's worth)", perm.total());

    // the scarce right glove earns 2/3, each left glove 1/6
    let estimate = estimate_additive(&game, 0, 0.05, 0.1, 1.0, 0).unwrap();
    println!(
        "\nsampled check for player 0: {:.4} from {} permutations (ε = 0.05)",
        estimate.value, estimate.samples
    );
}
