//! The exact polynomial pipeline, step by step: minimal witnesses, the
//! read-once circuit, size-stratified model counts, and the Shapley value
//! they yield.
//!
//!     cargo run --example read_once_lineage

use std::collections::BTreeSet;

use shapdb::relational::{parse_database, parse_query, witnesses};
use shapdb::shapq::{factorize_read_once, shapley_from_circuit, size_stratified_counts};

fn main() {
    let db = parse_database("endo R(a)\nendo S(a)\nendo R(b)").unwrap();
    let query = parse_query("q() :- R(x), S(x)").unwrap();

    println!("facts: [0] R(a)  [1] S(a)  [2] R(b)");
    println!("query: q() :- R(x), S(x)\n");

    let dnf = witnesses(&query, &db);
    println!("minimal witnesses (monotone DNF): {dnf:?}");

    let circuit = factorize_read_once(&query, &db).unwrap();
    println!("read-once circuit: {}", circuit.root);
    println!(
        "  variables: {:?}, read-once verified: {}\n",
        circuit.vars, circuit.read_once
    );

    // condition on fact 0 = R(a) and count satisfying assignments of the
    // other endogenous facts, stratified by how many are present
    let scope: BTreeSet<u64> = [1, 2].into();
    let c1 = size_stratified_counts(&circuit.condition(0, true), &scope).unwrap();
    let c0 = size_stratified_counts(&circuit.condition(0, false), &scope).unwrap();
    println!("counts with R(a) present:  {:?}", c1.counts);
    println!("counts with R(a) absent:   {:?}", c0.counts);

    // value = sum over k of  k!(n-1-k)!/n! * (C1[k] - C0[k])
    let value = shapley_from_circuit(&circuit, &db, 0).unwrap();
    println!("\nShapley value of R(a): {value}");
    for f in [1, 2] {
        println!(
            "Shapley value of {}: {}",
            db.fact(f).unwrap(),
            shapley_from_circuit(&circuit, &db, f).unwrap()
        );
    }
}
