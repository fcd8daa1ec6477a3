//! Where does an instance fall in the tractability dichotomies?
//!
//!     cargo run --example classify_tractability

use shapdb::relational::{parse_fds, parse_query};
use shapdb::shapi::{tractability_report, Measure};
use shapdb::shapq::classify_ucq;

fn main() {
    println!("== query classification ==");
    for text in [
        "q() :- R(x,y), S(x)",
        "q() :- R(x), T(x,y), S(y)",
        "q() :- R(x,y), R(y,z)",
    ] {
        let q = parse_query(text).unwrap();
        let c = classify_ucq(&q);
        let shape = &c.disjuncts[0];
        println!("\n{text}");
        println!(
            "  self-join-free: {}, hierarchical: {}, exact polynomial engine: {}",
            shape.self_join_free, shape.hierarchical, c.exact_polynomial
        );
        if let Some(hardness) = &c.hardness {
            println!("  {hardness}");
        }
    }

    println!("\n== FD tractability rows ==");
    for (name, text) in [
        ("{A->B, AC->D}", "R: A -> B\nR: A C -> D"),
        ("{A->B, B->A}", "R: A -> B\nR: B -> A"),
        ("{A->B, C->D}", "R: A -> B\nR: C -> D"),
    ] {
        let fds = parse_fds(text).unwrap();
        println!("\n{name}");
        for measure in Measure::ALL {
            let row = tractability_report(&fds, measure);
            println!(
                "  {:<8} lhs-chain: {:<30} exact: {:<15} fpras: {:?}",
                measure.to_string(),
                format!("{:?}", row.lhs_chain),
                format!("{:?}", row.exact),
                row.fpras
            );
        }
        let row = tractability_report(&fds, Measure::MaximalConsistent);
        for c in row.citations {
            println!("  cite: {c}");
        }
        for n in row.notes {
            println!("  note: {n}");
        }
    }
}
