//! Cross-module property tests: random instances checked against
//! independent definition-level oracles, plus structural invariants of the
//! engines (efficiency, symmetry, null players, linearity, quantization).

mod support;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::Rng;

use shapdb::budget::Budget;
use shapdb::relational::{
    conflict_graph, eval_boolean_with, parse_database, parse_fds, parse_query, witnesses, Fact,
    FactId, Provenance, Ucq,
};
use shapdb::shapi::{
    inconsistency_measure, shapi_closed_form, shapi_dispatch, shapi_game, Measure,
};
use shapdb::shapley::{
    estimate_additive, shapley_exact_permutations, shapley_exact_subsets, Coalition, CoalitionGame,
    FnGame, PlayerId,
};
use shapdb::shapq::{
    factorize_read_once, lineage_dnf, null_player, shapq_dispatch, shapq_game, DispatchConfig,
    EngineChoice,
};

use support::*;

fn mask_of(c: &Coalition) -> usize {
    c.iter().fold(0, |m, i| m | (1 << i))
}

/// A random game given by a utility table over masks, zero on the empty
/// coalition.
fn random_table_game(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> Vec<BigRational> {
    let mut table = vec![BigRational::zero(); 1 << n];
    for entry in table.iter_mut().skip(1) {
        *entry = rat(rng.gen_range(-6..=6), rng.gen_range(1..=4));
    }
    table
}

fn table_game(
    players: usize,
    table: Vec<BigRational>,
) -> FnGame<impl Fn(&Coalition) -> BigRational> {
    FnGame::with_player_count(players, move |c| table[mask_of(c)].clone())
}

#[test]
fn kernel_engines_agree_and_are_efficient_on_random_games() {
    let mut rng = rng(11);
    for round in 0..40 {
        let n = rng.gen_range(1..=6);
        let table = random_table_game(&mut rng, n);
        let grand = table[(1 << n) - 1].clone();
        let g = table_game(n, table);
        let perm = shapley_exact_permutations(&g, 9).unwrap();
        let sub = shapley_exact_subsets(&g, 20).unwrap();
        assert_eq!(perm.entries, sub.entries, "round {round}");
        assert_eq!(perm.total(), grand, "efficiency, round {round}");
    }
}

#[test]
fn kernel_denominators_divide_factorial() {
    // the attribution games are integer-valued (0/1 queries, measure
    // counts); for those, every exact value is a multiple of 1/n!
    let mut rng = rng(12);
    for _ in 0..20 {
        let n = rng.gen_range(1..=5);
        let table: Vec<BigRational> = std::iter::once(BigRational::zero())
            .chain((1..(1usize << n)).map(|_| rat(rng.gen_range(-6..=6), 1)))
            .collect();
        let g = table_game(n, table);
        let fact: BigInt = (1..=n as i64).product::<i64>().into();
        for (_, v) in shapley_exact_permutations(&g, 9).unwrap().entries {
            assert!(
                (&fact % v.denom()).is_zero(),
                "denominator {} vs {n}!",
                v.denom()
            );
        }
    }
}

#[test]
fn kernel_null_player_gets_zero() {
    let mut rng = rng(13);
    for _ in 0..20 {
        let n = rng.gen_range(2..=5);
        // utility ignores player 0 entirely
        let table = random_table_game(&mut rng, n - 1);
        let g = FnGame::with_player_count(n, move |c| {
            let mask = c
                .iter()
                .filter(|&i| i > 0)
                .fold(0, |m, i| m | (1 << (i - 1)));
            table[mask].clone()
        });
        let v = shapley_exact_subsets(&g, 20).unwrap();
        assert!(v.entries[0].1.is_zero());
    }
}

#[test]
fn kernel_symmetric_players_get_equal_values() {
    let mut rng = rng(14);
    for _ in 0..20 {
        let n = rng.gen_range(2..=5);
        // utility depends only on |{0,1} ∩ S| and the rest of the mask
        let table = random_table_game(&mut rng, n);
        let g = FnGame::with_player_count(n, move |c| {
            let both = usize::from(c.contains(0)) + usize::from(c.contains(1));
            let rest = c.iter().filter(|&i| i > 1).fold(0, |m, i| m | (1 << i));
            let canonical = match both {
                0 => rest,
                1 => rest | 0b01,
                _ => rest | 0b11,
            };
            table[canonical].clone()
        });
        let v = shapley_exact_permutations(&g, 9).unwrap();
        assert_eq!(v.entries[0].1, v.entries[1].1);
    }
}

#[test]
fn kernel_value_is_linear_in_the_game() {
    let mut rng = rng(15);
    for _ in 0..15 {
        let n = rng.gen_range(1..=5);
        let t1 = random_table_game(&mut rng, n);
        let t2 = random_table_game(&mut rng, n);
        let (c1, c2) = (rat(rng.gen_range(-3..=3), 2), rat(rng.gen_range(-3..=3), 3));
        let combined: Vec<BigRational> =
            t1.iter().zip(&t2).map(|(a, b)| &c1 * a + &c2 * b).collect();
        let v1 = shapley_exact_subsets(&table_game(n, t1), 20).unwrap();
        let v2 = shapley_exact_subsets(&table_game(n, t2), 20).unwrap();
        let vc = shapley_exact_subsets(&table_game(n, combined), 20).unwrap();
        for i in 0..n {
            assert_eq!(
                vc.entries[i].1,
                &c1 * &v1.entries[i].1 + &c2 * &v2.entries[i].1
            );
        }
    }
}

#[test]
fn eval_boolean_is_monotone_for_ucqs() {
    let mut rng = rng(21);
    for round in 0..60 {
        let cq = random_hierarchical_cq(&mut rng, 4);
        let q = Ucq::single(cq);
        let db = random_database_for(&mut rng, &q, 8, 3);
        // two nested random subsets of the endogenous part
        let endo = db.endogenous_ids();
        let small: BTreeSet<FactId> = endo.iter().copied().filter(|_| rng.gen_bool(0.4)).collect();
        let mut large = small.clone();
        for &f in &endo {
            if rng.gen_bool(0.5) {
                large.insert(f);
            }
        }
        let eval = |s: &BTreeSet<FactId>| {
            eval_boolean_with(&q, &db, |f: &Fact| {
                f.provenance == Provenance::Exogenous || s.contains(&f.id)
            })
        };
        assert!(
            !eval(&small) || eval(&large),
            "monotonicity failed, round {round}"
        );
    }
}

#[test]
fn witnesses_match_subset_oracle_and_are_minimal() {
    let mut rng = rng(22);
    for round in 0..40 {
        let cq = random_hierarchical_cq(&mut rng, 3);
        let q = Ucq::single(cq);
        let db = random_database_for(&mut rng, &q, 10, 3);
        let got = witnesses(&q, &db);
        let expected = oracle_witnesses(&q, &db);
        assert_eq!(got, expected, "round {round}");
        for w in &got {
            let sat = |s: &BTreeSet<FactId>| {
                eval_boolean_with(&q, &db, |f: &Fact| {
                    f.provenance == Provenance::Exogenous || s.contains(&f.id)
                })
            };
            assert!(sat(w));
            for &drop in w {
                let mut smaller = w.clone();
                smaller.remove(&drop);
                assert!(!sat(&smaller), "witness not minimal, round {round}");
            }
        }
    }
}

#[test]
fn conflict_graph_agrees_with_pairwise_violation_check() {
    let mut rng = rng(23);
    for _ in 0..40 {
        let (db, fds) = random_fd_instance(&mut rng, 9);
        let graph = conflict_graph(&db, &fds);
        for a in db.facts() {
            for b in db.facts() {
                if a.id >= b.id {
                    continue;
                }
                let direct = oracle_measures(&db, &fds, &BTreeSet::from([a.id, b.id]))[1] > 0;
                assert_eq!(graph.has_edge(a.id, b.id), direct, "{a} vs {b}");
            }
        }
    }
}

#[test]
fn circuit_matches_dnf_on_every_assignment() {
    let mut rng = rng(24);
    for round in 0..30 {
        let cq = random_hierarchical_cq(&mut rng, 4);
        let q = Ucq::single(cq);
        let db = random_database_for(&mut rng, &q, 12, 3);
        let endo = db.endogenous_ids();
        if endo.len() > 14 {
            continue;
        }
        let circuit = factorize_read_once(&q, &db).unwrap();
        let dnf = lineage_dnf(&q, &db);
        for mask in 0u32..(1 << endo.len()) {
            let on: BTreeSet<FactId> = endo
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &f)| f)
                .collect();
            let truth = |f: FactId| on.contains(&f);
            let from_circuit = circuit.root.eval(&truth);
            let from_dnf = shapdb::shapq::eval_dnf(&dnf, &truth);
            let from_eval = eval_boolean_with(&q, &db, |f: &Fact| {
                f.provenance == Provenance::Exogenous || on.contains(&f.id)
            });
            assert_eq!(from_circuit, from_dnf, "round {round} mask {mask:b}");
            assert_eq!(from_circuit, from_eval, "round {round} mask {mask:b}");
        }
    }
}

#[test]
fn shapq_engines_agree_with_oracle_and_each_other() {
    let mut rng = rng(25);
    let mut checked = 0;
    for _ in 0..25 {
        let cq = random_hierarchical_cq(&mut rng, 3);
        let q = Ucq::single(cq);
        let db = random_database_for(&mut rng, &q, 7, 2);
        let endo = db.endogenous_ids();
        if endo.is_empty() || endo.len() > 7 {
            continue;
        }
        checked += 1;
        let oracle = oracle_shapq(&q, &db);

        let cfg_h = DispatchConfig {
            engine: EngineChoice::Hierarchical,
            ..Default::default()
        };
        let cfg_p = DispatchConfig {
            engine: EngineChoice::BrutePermutations,
            ..Default::default()
        };
        let cfg_s = DispatchConfig {
            engine: EngineChoice::BruteSubsets,
            ..Default::default()
        };
        for cfg in [cfg_h, cfg_p, cfg_s] {
            let run = shapq_dispatch(&q, &db, None, &cfg).unwrap();
            let got: Vec<BigRational> = run
                .entries
                .iter()
                .map(|(_, v)| v.exact().unwrap().clone())
                .collect();
            assert_eq!(got, oracle, "engine {:?}", run.engine);
        }
    }
    assert!(
        checked >= 10,
        "generator starved the test ({checked} instances)"
    );
}

#[test]
fn shapq_zero_characterization_and_quantization() {
    let mut rng = rng(26);
    for _ in 0..25 {
        let cq = random_hierarchical_cq(&mut rng, 3);
        let q = Ucq::single(cq);
        let db = random_database_for(&mut rng, &q, 8, 2);
        let endo = db.endogenous_ids();
        if endo.is_empty() {
            continue;
        }
        let n_fact: BigInt = (1..=endo.len() as i64).product::<i64>().into();
        let run = shapq_dispatch(&q, &db, None, &DispatchConfig::default()).unwrap();
        for (f, v) in &run.entries {
            let v = v.exact().unwrap();
            // monotone game: values are nonnegative
            assert!(!v.is_negative(), "negative value for fact {f}");
            // zero exactly for null players
            assert_eq!(v.is_zero(), null_player(&q, &db, *f).unwrap(), "fact {f}");
            // nonzero values are multiples of 1/n!
            assert!(
                ((v * &n_fact).denom()).is_one(),
                "value {v} is not a multiple of 1/{}!",
                endo.len()
            );
        }
        // efficiency
        let total: BigRational = run
            .entries
            .iter()
            .map(|(_, v)| v.exact().unwrap().clone())
            .sum();
        assert_eq!(total, run.wealth);
    }
}

#[test]
fn shapq_union_exact_path_matches_oracle() {
    let mut rng = rng(27);
    let mut checked = 0;
    for _ in 0..20 {
        // two relation-disjoint hierarchical disjuncts
        let a = random_hierarchical_cq(&mut rng, 2);
        let mut b = random_hierarchical_cq(&mut rng, 2);
        for atom in &mut b.atoms {
            atom.relation = format!("S{}", atom.relation);
        }
        let q = Ucq {
            disjuncts: vec![a, b],
        };
        let db = random_database_for(&mut rng, &q, 7, 2);
        let endo = db.endogenous_ids();
        if endo.is_empty() || endo.len() > 7 {
            continue;
        }
        checked += 1;
        let run = shapq_dispatch(&q, &db, None, &DispatchConfig::default()).unwrap();
        if !run.classification.exact_polynomial {
            panic!("union of disjoint hierarchical disjuncts must take the exact path");
        }
        let got: Vec<BigRational> = run
            .entries
            .iter()
            .map(|(_, v)| v.exact().unwrap().clone())
            .collect();
        assert_eq!(got, oracle_shapq(&q, &db));
    }
    assert!(
        checked >= 8,
        "generator starved the test ({checked} instances)"
    );
}

#[test]
fn shapi_dispatch_matches_oracle_on_random_instances() {
    let mut rng = rng(28);
    let budget = Budget::default();
    for round in 0..12 {
        let (db, fds) = random_fd_instance(&mut rng, 6);
        for (idx, measure) in Measure::ALL.into_iter().enumerate() {
            let run = shapi_dispatch(
                &db,
                &fds,
                measure,
                None,
                &DispatchConfig::default(),
                &budget,
            )
            .unwrap();
            let got: Vec<BigRational> = run
                .entries
                .iter()
                .map(|(_, v)| v.exact().unwrap().clone())
                .collect();
            assert_eq!(
                got,
                oracle_shapi(&db, &fds, idx),
                "round {round}, {measure}"
            );
            let total: BigRational = got.iter().cloned().sum();
            assert_eq!(total, run.wealth, "efficiency, round {round}, {measure}");
            for v in &got {
                assert!(!v.is_negative(), "round {round}, {measure}");
            }
        }
    }
}

#[test]
fn shapi_measure_consistency_relations() {
    let mut rng = rng(29);
    let budget = Budget::default();
    for _ in 0..30 {
        let (db, fds) = random_fd_instance(&mut rng, 9);
        let get = |m| inconsistency_measure(&db, &fds, m, &budget).unwrap();
        let (d, mi, p, r) = (
            get(Measure::Drastic),
            get(Measure::MinimalInconsistent),
            get(Measure::Problematic),
            get(Measure::Repair),
        );
        assert!(r <= p, "I_R <= I_P");
        assert!(p <= rat(2, 1) * &mi, "I_P <= 2 I_MI");
        assert_eq!(d.is_zero(), mi.is_zero(), "drastic = sign(MI)");
    }
}

#[test]
fn shapi_mi_values_sum_to_edge_count() {
    let mut rng = rng(30);
    for _ in 0..25 {
        let (n, edges) = random_graph(&mut rng, 8, 0.4);
        let (db, fds) = graph_database(n, &edges);
        let graph = conflict_graph(&db, &fds);
        assert_eq!(graph.edge_count(), edges.len(), "realization is exact");
        let mut total = BigRational::zero();
        for f in 0..n as FactId {
            total += shapi_closed_form(&db, &fds, Measure::MinimalInconsistent, f).unwrap();
        }
        assert_eq!(total, rat(edges.len() as i64, 1));
    }
}

#[test]
fn estimates_are_deterministic_per_seed_and_player_independent() {
    let (db, fds) = graph_database(4, &[(0, 1), (1, 2)]);
    let budget = Budget::default();
    let game = shapi_game(&db, &fds, Measure::Drastic, &budget).unwrap();
    let a = estimate_additive(&game, 1, 0.2, 0.2, 1.0, 5).unwrap();
    let b = estimate_additive(&game, 1, 0.2, 0.2, 1.0, 5).unwrap();
    assert_eq!(a, b);
    // a different player's stream does not disturb player 1's estimate
    let _ = estimate_additive(&game, 0, 0.2, 0.2, 1.0, 5).unwrap();
    let c = estimate_additive(&game, 1, 0.2, 0.2, 1.0, 5).unwrap();
    assert_eq!(a, c);
}

#[test]
fn shapq_game_players_and_positions_are_stable() {
    let q = parse_query("q() :- R(x), S(x)").unwrap();
    let db = parse_database("exo R(a)\nendo S(a)\nendo R(b)").unwrap();
    let game = shapq_game(&q, &db);
    assert_eq!(game.players(), &[1, 2]);
    assert_eq!(game.position_of(2), Some(1));
    assert_eq!(game.position_of(0), None);
}

// ---------------------------------------------------------------------
// proptest: parser totality and small-game kernel laws on arbitrary input
// ---------------------------------------------------------------------

proptest! {
    #[test]
    fn parsers_never_panic(text in ".{0,200}") {
        let _ = parse_database(&text);
        let _ = parse_query(&text);
        let _ = parse_fds(&text);
    }

    #[test]
    fn fact_files_round_trip_their_counts(
        lines in prop::collection::vec((0u8..2, 0u8..3, prop::collection::vec(0i64..5, 0..3)), 0..8)
    ) {
        let mut text = String::new();
        let mut expected = 0usize;
        let mut seen = std::collections::BTreeSet::new();
        for (prov, rel, vals) in &lines {
            let tag = if *prov == 0 { "endo" } else { "exo" };
            let rel_name = format!("R{rel}");
            let args = vals.iter().map(i64::to_string).collect::<Vec<_>>().join(",");
            text.push_str(&format!("{tag} {rel_name}({args})\n"));
            // only the first occurrence of a tuple with a fixed arity parses
            if seen.insert((rel_name.clone(), vals.clone())) {
                expected += 1;
            }
        }
        match parse_database(&text) {
            Ok(db) => prop_assert_eq!(db.len(), expected),
            Err(_) => {
                // duplicate tuple or arity conflict: both need a repeated relation
                prop_assert!(lines.len() >= 2);
            }
        }
    }

    #[test]
    fn kernel_efficiency_on_arbitrary_small_games(
        utilities in prop::collection::vec((-8i64..8, 1i64..5), 7..8)
    ) {
        // three players, seven nonempty coalitions
        let table: Vec<BigRational> = std::iter::once(BigRational::zero())
            .chain(utilities.iter().map(|&(n, d)| rat(n, d)))
            .collect();
        let grand = table[7].clone();
        let g = FnGame::with_player_count(3, move |c: &Coalition| table[mask_of(c)].clone());
        let v = shapley_exact_permutations(&g, 9).unwrap();
        prop_assert_eq!(v.total(), grand);
        let s = shapley_exact_subsets(&g, 20).unwrap();
        prop_assert_eq!(v.entries, s.entries);
    }
}

// keep PlayerId in scope for signature checks above
#[allow(dead_code)]
fn _typecheck(p: PlayerId) -> u64 {
    p
}
