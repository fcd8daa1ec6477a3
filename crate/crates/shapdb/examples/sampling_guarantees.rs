//! Monte-Carlo estimation with (ε, δ) guarantees, against known exact
//! values.
//!
//!     cargo run --release --example sampling_guarantees

use num_traits::ToPrimitive;

use shapdb::relational::{parse_database, parse_query};
use shapdb::shapley::{estimate_additive, estimate_multiplicative, sample_size, CoalitionGame};
use shapdb::shapq::{shapq_dispatch, shapq_game, DispatchConfig};

fn main() {
    let db = parse_database("endo R(a)\nendo S(a)\nendo R(b)").unwrap();
    let query = parse_query("q() :- R(x), S(x)").unwrap();

    // exact reference values from the read-once engine
    let exact = shapq_dispatch(&query, &db, None, &DispatchConfig::default()).unwrap();
    println!("exact values:");
    for (f, v) in &exact.entries {
        println!("  {}: {}", db.fact(*f).unwrap(), v.exact().unwrap());
    }

    let game = shapq_game(&query, &db);
    let (epsilon, delta) = (0.05, 0.1);
    let m = sample_size(epsilon, delta, 1.0).unwrap();
    println!("\nadditive estimator: ε = {epsilon}, δ = {delta} -> {m} sampled permutations");
    for (f, v) in &exact.entries {
        let estimate = estimate_additive(&game, *f, epsilon, delta, 1.0, 0).unwrap();
        let truth = v.exact().unwrap().to_f64().unwrap();
        println!(
            "  {}: estimate {:.4}, |error| {:.4} (bound {epsilon})",
            db.fact(*f).unwrap(),
            estimate.value,
            (estimate.value - truth).abs()
        );
    }

    // multiplicative mode assumes values are 0 or at least a known gap;
    // small raw means are rounded down to exactly zero
    let n = game.players().len();
    let gap = 1.0 / (n as f64 * (n - 1) as f64);
    println!("\nmultiplicative estimator: ε = 0.2, δ = {delta}, gap = {gap:.4}");
    for (f, _) in &exact.entries {
        let estimate = estimate_multiplicative(&game, *f, 0.2, delta, gap, 1.0, 0).unwrap();
        println!(
            "  {}: estimate {:.4} from {} samples",
            db.fact(*f).unwrap(),
            estimate.value,
            estimate.samples
        );
    }
}
