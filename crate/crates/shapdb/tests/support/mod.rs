//! Shared test support: independent brute-force oracles and seeded
//! instance generators. The oracles compute straight from definitions
//! (permutation averages, subset enumeration, pairwise FD checks) so that
//! the engines under test are checked against something that shares none
//! of their code paths.

// each integration-test target compiles its own copy; not all use all of it
#![allow(dead_code)]

use std::collections::BTreeSet;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use shapdb::relational::{
    classify_cq, eval_boolean_with, Atom, Cq, Database, Fact, FactId, Fd, Provenance, Term, Ucq,
    Value,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

// ---------------------------------------------------------------------
// independent Shapley oracle
// ---------------------------------------------------------------------

/// Shapley values straight from the permutation definition, for a utility
/// given as a closure over membership slices. Exponential; keep n small.
pub fn oracle_shapley<F>(n: usize, utility: F) -> Vec<BigRational>
where
    F: Fn(&[bool]) -> BigRational,
{
    let mut sums = vec![BigRational::zero(); n];
    let mut permutations = 0u64;
    for perm in (0..n).permutations(n) {
        permutations += 1;
        let mut members = vec![false; n];
        let mut prev = utility(&members);
        for i in perm {
            members[i] = true;
            let next = utility(&members);
            sums[i] += &next - &prev;
            prev = next;
        }
    }
    if n == 0 {
        return Vec::new();
    }
    let total = BigRational::from_integer(BigInt::from(permutations));
    sums.into_iter().map(|s| s / &total).collect()
}

// ---------------------------------------------------------------------
// independent witness oracle (subset enumeration)
// ---------------------------------------------------------------------

/// Minimal endogenous support sets by enumerating all endogenous subsets.
pub fn oracle_witnesses(q: &Ucq, db: &Database) -> Vec<BTreeSet<FactId>> {
    let endo = db.endogenous_ids();
    assert!(endo.len() <= 16, "oracle is exponential");
    let mut satisfying: Vec<BTreeSet<FactId>> = Vec::new();
    for mask in 0u32..(1 << endo.len()) {
        let subset: BTreeSet<FactId> = endo
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &f)| f)
            .collect();
        let sat = eval_boolean_with(q, db, |f: &Fact| {
            f.provenance == Provenance::Exogenous || subset.contains(&f.id)
        });
        if sat {
            satisfying.push(subset);
        }
    }
    satisfying.sort_by_key(BTreeSet::len);
    let mut minimal: Vec<BTreeSet<FactId>> = Vec::new();
    for s in satisfying {
        if !minimal.iter().any(|m| m.is_subset(&s)) {
            minimal.push(s);
        }
    }
    minimal.sort();
    minimal
}

// ---------------------------------------------------------------------
// independent inconsistency-measure oracle (pairwise FD semantics)
// ---------------------------------------------------------------------

fn violates(a: &Fact, b: &Fact, fds: &[Fd]) -> bool {
    fds.iter().any(|fd| {
        a.relation == fd.relation
            && b.relation == fd.relation
            && fd.lhs.iter().all(|&i| a.values.get(i) == b.values.get(i))
            && fd.rhs.iter().any(|&i| a.values.get(i) != b.values.get(i))
            && fd.rhs.iter().all(|&i| a.values.get(i).is_some())
    })
}

fn consistent(db: &Database, fds: &[Fd], subset: &BTreeSet<FactId>) -> bool {
    let facts: Vec<&Fact> = subset.iter().map(|&i| db.fact(i).unwrap()).collect();
    facts
        .iter()
        .enumerate()
        .all(|(i, a)| facts[i + 1..].iter().all(|b| !violates(a, b, fds)))
}

fn subsets_of(set: &BTreeSet<FactId>) -> Vec<BTreeSet<FactId>> {
    let items: Vec<FactId> = set.iter().copied().collect();
    (0u32..(1 << items.len()))
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &f)| f)
                .collect()
        })
        .collect()
}

/// (drastic, MI, P, R, MC) of a coalition, straight from the definitions.
pub fn oracle_measures(db: &Database, fds: &[Fd], coalition: &BTreeSet<FactId>) -> [u64; 5] {
    let facts: Vec<&Fact> = coalition.iter().map(|&i| db.fact(i).unwrap()).collect();
    let mut mi = 0u64;
    let mut problematic: BTreeSet<FactId> = BTreeSet::new();
    for (i, a) in facts.iter().enumerate() {
        for b in &facts[i + 1..] {
            if violates(a, b, fds) {
                mi += 1;
                problematic.insert(a.id);
                problematic.insert(b.id);
            }
        }
    }
    let drastic = u64::from(mi > 0);

    let all_subsets = subsets_of(coalition);
    let repair = all_subsets
        .iter()
        .filter(|s| {
            let kept: BTreeSet<FactId> = coalition.difference(s).copied().collect();
            consistent(db, fds, &kept)
        })
        .map(BTreeSet::len)
        .min()
        .unwrap() as u64;

    let mc = if coalition.is_empty() {
        0
    } else {
        all_subsets
            .iter()
            .filter(|s| {
                consistent(db, fds, s)
                    && coalition.difference(s).all(|&extra| {
                        let mut bigger: BTreeSet<FactId> = (*s).clone();
                        bigger.insert(extra);
                        !consistent(db, fds, &bigger)
                    })
            })
            .count() as u64
    };

    [drastic, mi, problematic.len() as u64, repair, mc]
}

/// Oracle Shapley vector for one measure: permutation definition over the
/// oracle measure semantics. Index m: 0 drastic, 1 MI, 2 P, 3 R, 4 MC.
pub fn oracle_shapi(db: &Database, fds: &[Fd], m: usize) -> Vec<BigRational> {
    let ids: Vec<FactId> = db.facts().iter().map(|f| f.id).collect();
    oracle_shapley(ids.len(), |members| {
        let coalition: BTreeSet<FactId> = ids
            .iter()
            .zip(members)
            .filter(|(_, &on)| on)
            .map(|(&f, _)| f)
            .collect();
        BigRational::from_integer(oracle_measures(db, fds, &coalition)[m].into())
    })
}

/// Oracle Shapley vector for the query game, players in endogenous-id
/// order.
pub fn oracle_shapq(q: &Ucq, db: &Database) -> Vec<BigRational> {
    let endo = db.endogenous_ids();
    let base = BigRational::from_integer(
        i64::from(eval_boolean_with(q, db, |f: &Fact| {
            f.provenance == Provenance::Exogenous
        }))
        .into(),
    );
    oracle_shapley(endo.len(), |members| {
        let on: BTreeSet<FactId> = endo
            .iter()
            .zip(members)
            .filter(|(_, &m)| m)
            .map(|(&f, _)| f)
            .collect();
        let sat = eval_boolean_with(q, db, |f: &Fact| {
            f.provenance == Provenance::Exogenous || on.contains(&f.id)
        });
        BigRational::from_integer(i64::from(sat).into()) - &base
    })
}

// ---------------------------------------------------------------------
// generators
// ---------------------------------------------------------------------

/// A random self-join-free hierarchical CQ with at most `max_atoms` atoms
/// (rejection sampling on the hierarchy test).
pub fn random_hierarchical_cq(rng: &mut ChaCha8Rng, max_atoms: usize) -> Cq {
    let vars = ["x", "y", "z"];
    loop {
        let n_atoms = rng.gen_range(1..=max_atoms);
        let atoms = (0..n_atoms)
            .map(|i| {
                let arity = rng.gen_range(1..=3);
                let terms = (0..arity)
                    .map(|_| {
                        if rng.gen_bool(0.85) {
                            Term::Var(vars[rng.gen_range(0..vars.len())].to_owned())
                        } else {
                            Term::Const(Value::Int(rng.gen_range(0..3)))
                        }
                    })
                    .collect();
                Atom {
                    relation: format!("R{i}"),
                    terms,
                }
            })
            .collect();
        let cq = Cq { atoms };
        let shape = classify_cq(&cq);
        if shape.hierarchical && shape.self_join_free {
            return cq;
        }
    }
}

/// A random database for the relations of `q`: up to `max_endo` endogenous
/// and `max_exo` exogenous facts with values from a small collision-prone
/// domain.
pub fn random_database_for(
    rng: &mut ChaCha8Rng,
    q: &Ucq,
    max_endo: usize,
    max_exo: usize,
) -> Database {
    let mut relations: Vec<(String, usize)> = Vec::new();
    for cq in &q.disjuncts {
        for atom in &cq.atoms {
            if !relations.iter().any(|(r, _)| *r == atom.relation) {
                relations.push((atom.relation.clone(), atom.terms.len()));
            }
        }
    }
    let mut db = Database::new();
    let n_endo = rng.gen_range(1..=max_endo.max(1));
    let n_exo = rng.gen_range(0..=max_exo);
    let mut added_endo = 0;
    let mut added_exo = 0;
    for attempt in 0..(4 * (max_endo + max_exo + 1)) {
        if added_endo >= n_endo && added_exo >= n_exo {
            break;
        }
        let (rel, arity) = relations[rng.gen_range(0..relations.len())].clone();
        let values: Vec<Value> = (0..arity)
            .map(|_| Value::Int(rng.gen_range(0..3)))
            .collect();
        let provenance = if added_endo < n_endo && (added_exo >= n_exo || attempt % 3 != 0) {
            Provenance::Endogenous
        } else {
            Provenance::Exogenous
        };
        if db.add_fact(&rel, values, provenance).is_ok() {
            match provenance {
                Provenance::Endogenous => added_endo += 1,
                Provenance::Exogenous => added_exo += 1,
            }
        }
    }
    db
}

/// Realizes an arbitrary graph as a conflict graph: one fact per vertex,
/// one FD and one dedicated attribute per edge. The two endpoints share a
/// marker value in the edge's attribute and differ in the id attribute;
/// all other facts hold unique values everywhere.
pub fn graph_database(n: usize, edges: &[(usize, usize)]) -> (Database, Vec<Fd>) {
    let arity = 1 + edges.len();
    let mut db = Database::new();
    for v in 0..n {
        let mut values = vec![Value::Int(v as i64)];
        for (e, &(a, b)) in edges.iter().enumerate() {
            if v == a || v == b {
                values.push(Value::Int(-1 - e as i64));
            } else {
                values.push(Value::Int((100 + v) as i64));
            }
        }
        assert_eq!(values.len(), arity);
        db.add_fact("E", values, Provenance::Endogenous).unwrap();
    }
    let fds = edges
        .iter()
        .enumerate()
        .map(|(e, _)| Fd::new("E", [1 + e], [0]))
        .collect();
    (db, fds)
}

/// A random graph G(n, p) as (vertex count, edge list).
pub fn random_graph(rng: &mut ChaCha8Rng, max_n: usize, p: f64) -> (usize, Vec<(usize, usize)>) {
    let n = rng.gen_range(2..=max_n);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    (n, edges)
}

/// A random FD-constrained database over a single ternary relation with a
/// collision-heavy value domain, together with an FD set drawn from a
/// small catalog.
pub fn random_fd_instance(rng: &mut ChaCha8Rng, max_facts: usize) -> (Database, Vec<Fd>) {
    let catalog: [&[(&[usize], &[usize])]; 5] = [
        &[(&[0], &[1])],
        &[(&[0], &[1]), (&[1], &[0])],
        &[(&[0], &[1]), (&[0, 2], &[1])],
        &[(&[0], &[1]), (&[2], &[1])],
        &[(&[0], &[1, 2])],
    ];
    let fds: Vec<Fd> = catalog[rng.gen_range(0..catalog.len())]
        .iter()
        .map(|(lhs, rhs)| Fd::new("R", lhs.iter().copied(), rhs.iter().copied()))
        .collect();
    let mut db = Database::new();
    let target = rng.gen_range(2..=max_facts);
    for _ in 0..(4 * target) {
        if db.len() >= target {
            break;
        }
        let values = (0..3).map(|_| Value::Int(rng.gen_range(0..3))).collect();
        let _ = db.add_fact("R", values, Provenance::Endogenous);
    }
    (db, fds)
}
