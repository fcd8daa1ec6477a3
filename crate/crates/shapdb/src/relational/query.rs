//! Boolean conjunctive queries and unions thereof: evaluation by
//! homomorphism search, minimal witness enumeration, and the structural
//! classification (self-join-freeness, hierarchy) that drives engine
//! dispatch.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::relational::{Database, Fact, FactId, Value};

/// A term of a query atom.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(Value),
}

/// One atom `R(t1,...,tk)` of a conjunctive query body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub relation: String,
    pub terms: Vec<Term>,
}

impl Atom {
    pub fn variables(&self) -> BTreeSet<&str> {
        self.terms
            .iter()
            .filter_map(|t| match t {
                Term::Var(v) => Some(v.as_str()),
                Term::Const(_) => None,
            })
            .collect()
    }
}

/// A Boolean conjunctive query: a nonempty conjunction of atoms, all
/// variables existential.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cq {
    pub atoms: Vec<Atom>,
}

impl Cq {
    /// All variables of the body, sorted by name.
    pub fn variables(&self) -> BTreeSet<&str> {
        self.atoms.iter().flat_map(|a| a.variables()).collect()
    }

    /// Relation symbols used, with multiplicity.
    pub fn relations(&self) -> Vec<&str> {
        self.atoms.iter().map(|a| a.relation.as_str()).collect()
    }
}

/// A Boolean union of conjunctive queries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ucq {
    pub disjuncts: Vec<Cq>,
}

impl Ucq {
    pub fn single(cq: Cq) -> Self {
        Ucq {
            disjuncts: vec![cq],
        }
    }
}

/// Structural classification of a single CQ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CqShape {
    pub self_join_free: bool,
    pub hierarchical: bool,
}

/// Classifies a CQ. The query is hierarchical when for every two variables
/// y, y' the sets of atoms using them are nested or disjoint; it is
/// self-join-free when no relation symbol occurs twice. Both properties
/// are order-insensitive in the atom list.
pub fn classify_cq(q: &Cq) -> CqShape {
    let mut seen = BTreeSet::new();
    let self_join_free = q.atoms.iter().all(|a| seen.insert(a.relation.as_str()));

    // atom occurrence sets per variable, as atom-index bitsets
    let mut occurs: BTreeMap<&str, u64> = BTreeMap::new();
    for (i, atom) in q.atoms.iter().enumerate() {
        for v in atom.variables() {
            *occurs.entry(v).or_insert(0) |= 1u64 << i;
        }
    }
    let sets: Vec<u64> = occurs.into_values().collect();
    let mut hierarchical = true;
    'outer: for (i, &a) in sets.iter().enumerate() {
        for &b in &sets[i + 1..] {
            let inter = a & b;
            if inter != 0 && inter != a && inter != b {
                hierarchical = false;
                break 'outer;
            }
        }
    }
    CqShape {
        self_join_free,
        hierarchical,
    }
}

/// Index of the facts visible to one evaluation, grouped by relation.
pub(crate) struct FactIndex<'a> {
    by_relation: HashMap<&'a str, Vec<&'a Fact>>,
}

impl<'a> FactIndex<'a> {
    pub(crate) fn new<F>(db: &'a Database, keep: F) -> Self
    where
        F: Fn(&Fact) -> bool,
    {
        let mut by_relation: HashMap<&str, Vec<&Fact>> = HashMap::new();
        for fact in db.facts() {
            if keep(fact) {
                by_relation
                    .entry(fact.relation.as_str())
                    .or_default()
                    .push(fact);
            }
        }
        FactIndex { by_relation }
    }

    fn candidates(&self, relation: &str) -> &[&'a Fact] {
        self.by_relation.get(relation).map_or(&[], Vec::as_slice)
    }
}

/// Tries to extend `binding` so that `fact` matches `atom`. Returns the
/// variables newly bound, or None on mismatch.
fn match_atom<'q>(
    atom: &'q Atom,
    fact: &Fact,
    binding: &mut HashMap<&'q str, Value>,
) -> Option<Vec<&'q str>> {
    if fact.values.len() != atom.terms.len() {
        return None;
    }
    let mut added = Vec::new();
    for (term, value) in atom.terms.iter().zip(&fact.values) {
        let ok = match term {
            Term::Const(c) => c == value,
            Term::Var(v) => match binding.get(v.as_str()) {
                Some(bound) => bound == value,
                None => {
                    binding.insert(v.as_str(), value.clone());
                    added.push(v.as_str());
                    true
                }
            },
        };
        if !ok {
            for v in &added {
                binding.remove(v);
            }
            return None;
        }
    }
    Some(added)
}

fn search<'q>(
    atoms: &'q [Atom],
    index: &FactIndex<'_>,
    binding: &mut HashMap<&'q str, Value>,
    used_endo: &mut BTreeSet<FactId>,
    on_match: &mut dyn FnMut(&BTreeSet<FactId>) -> bool,
) -> bool {
    let Some((atom, rest)) = atoms.split_first() else {
        return on_match(used_endo);
    };
    for fact in index.candidates(&atom.relation) {
        if let Some(added) = match_atom(atom, fact, binding) {
            let inserted = fact.is_endogenous() && used_endo.insert(fact.id);
            let stop = search(rest, index, binding, used_endo, on_match);
            if inserted {
                used_endo.remove(&fact.id);
            }
            for v in added {
                binding.remove(v);
            }
            if stop {
                return true;
            }
        }
    }
    false
}

pub(crate) fn eval_cq_on(q: &Cq, index: &FactIndex<'_>) -> bool {
    let mut binding = HashMap::new();
    let mut endo = BTreeSet::new();
    search(&q.atoms, index, &mut binding, &mut endo, &mut |_| true)
}

/// Evaluates a Boolean UCQ over the full database (both provenances).
/// Relations absent from the schema are treated as empty.
pub fn eval_boolean(q: &Ucq, db: &Database) -> bool {
    eval_boolean_with(q, db, |_| true)
}

/// Evaluates a Boolean UCQ over the facts selected by `keep`.
pub fn eval_boolean_with<F>(q: &Ucq, db: &Database, keep: F) -> bool
where
    F: Fn(&Fact) -> bool,
{
    let index = FactIndex::new(db, keep);
    q.disjuncts.iter().any(|cq| eval_cq_on(cq, &index))
}

/// Enumerates the minimal endogenous support sets of `q` on `db`: the
/// inclusion-minimal sets W of endogenous facts with q(W ∪ exogenous) true.
/// Empty result iff the query is false on the database; contains the empty
/// set iff the exogenous part alone satisfies the query.
pub fn witnesses(q: &Ucq, db: &Database) -> Vec<BTreeSet<FactId>> {
    let index = FactIndex::new(db, |_| true);
    let mut supports: BTreeSet<BTreeSet<FactId>> = BTreeSet::new();
    for cq in &q.disjuncts {
        let mut binding = HashMap::new();
        let mut endo = BTreeSet::new();
        search(&cq.atoms, &index, &mut binding, &mut endo, &mut |w| {
            supports.insert(w.clone());
            false
        });
    }
    minimal_antichain(supports)
}

fn minimal_antichain(sets: BTreeSet<BTreeSet<FactId>>) -> Vec<BTreeSet<FactId>> {
    let mut by_size: Vec<BTreeSet<FactId>> = sets.into_iter().collect();
    by_size.sort_by_key(BTreeSet::len);
    let mut minimal: Vec<BTreeSet<FactId>> = Vec::new();
    for s in by_size {
        if !minimal.iter().any(|m| m.is_subset(&s)) {
            minimal.push(s);
        }
    }
    minimal.sort();
    minimal
}
