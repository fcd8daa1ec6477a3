//! Attribution of facts to database inconsistency under five measures.
//!
//!     cargo run --example inconsistency_attribution

use shapdb::budget::Budget;
use shapdb::relational::{parse_database, parse_fds};
use shapdb::shapi::{inconsistency_measure, shapi_dispatch, Measure};
use shapdb::shapq::DispatchConfig;

fn main() {
    // R(1,a) and R(1,b) agree on A but differ on B, violating A -> B;
    // R(2,c) is in no conflict
    let db = parse_database(
        "endo R(1,a)\n\
         endo R(1,b)\n\
         endo R(2,c)\n",
    )
    .unwrap();
    let fds = parse_fds("R: A -> B").unwrap();
    let budget = Budget::default();

    println!("facts: R(1,a), R(1,b), R(2,c)   constraint: R: A -> B\n");
    println!("measure  I(D)   per-fact Shapley values");
    for measure in Measure::ALL {
        let total = inconsistency_measure(&db, &fds, measure, &budget).unwrap();
        let run = shapi_dispatch(
            &db,
            &fds,
            measure,
            None,
            &DispatchConfig::default(),
            &budget,
        )
        .unwrap();
        let values: Vec<String> = run
            .entries
            .iter()
            .map(|(_, v)| v.exact().unwrap().to_string())
            .collect();
        println!(
            "{:<8} {:<6} [{}]   engine: {}",
            measure.to_string(),
            total,
            values.join(", "),
            run.engine
        );
    }

    println!(
        "\ndrastic flags inconsistency; MI counts conflicting pairs; P counts facts\n\
         in conflicts; R is the fewest deletions to consistency; MC counts the\n\
         maximal consistent subsets. Each vector sums to its measure."
    );
}
