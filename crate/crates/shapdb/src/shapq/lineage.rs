//! Boolean provenance of a query on a database.
//!
//! Two forms are produced: a monotone DNF whose conjuncts are the minimal
//! endogenous witness sets, and — for hierarchical self-join-free queries —
//! an equivalent read-once circuit built directly from the hierarchy
//! structure. In a read-once circuit every fact variable occurs exactly
//! once, which is what makes size-stratified model counting (and with it
//! exact Shapley values) polynomial.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::relational::{
    classify_cq, witnesses, Atom, Cq, Database, Fact, FactId, Term, Ucq, Value,
};

/// A Boolean circuit over fact variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Circuit {
    Const(bool),
    Var(FactId),
    And(Vec<Circuit>),
    Or(Vec<Circuit>),
}

impl Circuit {
    /// Evaluates under a truth assignment of the fact variables.
    pub fn eval<F>(&self, truth: &F) -> bool
    where
        F: Fn(FactId) -> bool,
    {
        match self {
            Circuit::Const(b) => *b,
            Circuit::Var(f) => truth(*f),
            Circuit::And(children) => children.iter().all(|c| c.eval(truth)),
            Circuit::Or(children) => children.iter().any(|c| c.eval(truth)),
        }
    }

    /// Replaces the variable `f` by a constant.
    pub fn condition(&self, f: FactId, value: bool) -> Circuit {
        match self {
            Circuit::Var(g) if *g == f => Circuit::Const(value),
            Circuit::Const(_) | Circuit::Var(_) => self.clone(),
            Circuit::And(children) => {
                Circuit::And(children.iter().map(|c| c.condition(f, value)).collect())
            }
            Circuit::Or(children) => {
                Circuit::Or(children.iter().map(|c| c.condition(f, value)).collect())
            }
        }
    }

    fn collect_vars(&self, into: &mut Vec<FactId>) {
        match self {
            Circuit::Const(_) => {}
            Circuit::Var(f) => into.push(*f),
            Circuit::And(children) | Circuit::Or(children) => {
                for c in children {
                    c.collect_vars(into);
                }
            }
        }
    }
}

impl std::fmt::Display for Circuit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fn write_gate(
            f: &mut std::fmt::Formatter<'_>,
            children: &[Circuit],
            op: &str,
        ) -> std::fmt::Result {
            write!(f, "(")?;
            for (i, c) in children.iter().enumerate() {
                if i > 0 {
                    write!(f, " {op} ")?;
                }
                write!(f, "{c}")?;
            }
            write!(f, ")")
        }
        match self {
            Circuit::Const(b) => write!(f, "{}", u8::from(*b)),
            Circuit::Var(id) => write!(f, "f{id}"),
            Circuit::And(children) => write_gate(f, children, "&"),
            Circuit::Or(children) => write_gate(f, children, "|"),
        }
    }
}

/// A circuit together with its variable set and a verified read-once flag.
#[derive(Debug, Clone)]
pub struct LineageCircuit {
    pub root: Circuit,
    pub vars: BTreeSet<FactId>,
    pub read_once: bool,
}

impl LineageCircuit {
    /// Wraps a circuit, verifying that no variable occurs twice. Fails on
    /// duplicate occurrences: the factorization is expected to produce
    /// branch-disjoint gates and a violation is a bug, not an input error.
    fn verified(root: Circuit) -> Result<Self> {
        let mut occurrences = Vec::new();
        root.collect_vars(&mut occurrences);
        let vars: BTreeSet<FactId> = occurrences.iter().copied().collect();
        if vars.len() != occurrences.len() {
            return Err(Error::Internal(
                "read-once verification failed: a fact variable occurs twice".into(),
            ));
        }
        Ok(LineageCircuit {
            root,
            vars,
            read_once: true,
        })
    }

    /// Conditions on one fact variable; read-onceness is preserved.
    pub fn condition(&self, f: FactId, value: bool) -> LineageCircuit {
        let mut vars = self.vars.clone();
        vars.remove(&f);
        LineageCircuit {
            root: self.root.condition(f, value),
            vars,
            read_once: self.read_once,
        }
    }
}

/// The lineage of `q` on `db` as a monotone DNF over endogenous fact ids:
/// the list of minimal witness sets. The empty list is the constant-false
/// lineage (query unsatisfiable on the full database); a list containing
/// the empty set is the constant-true lineage (the exogenous part alone
/// satisfies the query, so no endogenous fact matters).
pub fn lineage_dnf(q: &Ucq, db: &Database) -> Vec<BTreeSet<FactId>> {
    witnesses(q, db)
}

/// Evaluates a monotone DNF on a set of true variables.
pub fn eval_dnf(dnf: &[BTreeSet<FactId>], truth: &impl Fn(FactId) -> bool) -> bool {
    dnf.iter().any(|conj| conj.iter().all(|&f| truth(f)))
}

fn or_of(mut children: Vec<Circuit>) -> Circuit {
    if children.iter().any(|c| matches!(c, Circuit::Const(true))) {
        // a satisfied branch swallows the gate; the dropped variables are
        // irrelevant to the query and contribute free binomial factors later
        return Circuit::Const(true);
    }
    children.retain(|c| !matches!(c, Circuit::Const(false)));
    match children.len() {
        0 => Circuit::Const(false),
        1 => children.pop().unwrap(),
        _ => Circuit::Or(children),
    }
}

fn and_of(mut children: Vec<Circuit>) -> Circuit {
    children.retain(|c| !matches!(c, Circuit::Const(true)));
    match children.len() {
        0 => Circuit::Const(true),
        1 => children.pop().unwrap(),
        _ => Circuit::And(children),
    }
}

/// One atom of the query during factorization: its unresolved variable
/// positions and the facts still compatible with the substitutions made
/// so far.
struct AtomState<'a> {
    /// variable name -> positions within the atom (only unbound variables)
    var_positions: BTreeMap<&'a str, Vec<usize>>,
    candidates: Vec<&'a Fact>,
}

impl<'a> AtomState<'a> {
    fn from_atom(atom: &'a Atom, db: &'a Database) -> Self {
        let mut var_positions: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, t) in atom.terms.iter().enumerate() {
            if let Term::Var(v) = t {
                var_positions.entry(v.as_str()).or_default().push(i);
            }
        }
        let candidates = db
            .facts()
            .iter()
            .filter(|f| f.relation == atom.relation && matches_pattern(f, atom))
            .collect();
        AtomState {
            var_positions,
            candidates,
        }
    }
}

/// Constant positions agree and repeated variables within the atom carry
/// equal values.
fn matches_pattern(fact: &Fact, atom: &Atom) -> bool {
    if fact.values.len() != atom.terms.len() {
        return false;
    }
    let mut seen: HashMap<&str, &Value> = HashMap::new();
    for (term, value) in atom.terms.iter().zip(&fact.values) {
        match term {
            Term::Const(c) => {
                if c != value {
                    return false;
                }
            }
            Term::Var(v) => match seen.get(v.as_str()) {
                Some(prev) => {
                    if *prev != value {
                        return false;
                    }
                }
                None => {
                    seen.insert(v.as_str(), value);
                }
            },
        }
    }
    true
}

/// Recursive factorization of a hierarchical component.
///
/// Invariants at every call: the atoms of one call form the whole residual
/// query of a branch, and every candidate fact already agrees with all
/// substitutions made on the path to this call.
fn build(atoms: &[AtomState<'_>]) -> Result<Circuit> {
    if atoms.is_empty() {
        return Ok(Circuit::Const(true));
    }

    // (ii) split into variable-disjoint components -> AND
    let components = connected_components(atoms);
    if components.len() > 1 {
        let children = components
            .into_iter()
            .map(|part| {
                let slice: Vec<AtomState<'_>> = part;
                build(&slice)
            })
            .collect::<Result<Vec<_>>>()?;
        return Ok(and_of(children));
    }

    // (iii) a single atom grounds into an OR over its matching facts
    if atoms.len() == 1 {
        let leaves = atoms[0]
            .candidates
            .iter()
            .map(|f| {
                if f.is_endogenous() {
                    Circuit::Var(f.id)
                } else {
                    Circuit::Const(true)
                }
            })
            .collect();
        return Ok(or_of(leaves));
    }

    // (i) a connected component with >= 2 atoms: some variable occurs in
    // every atom (this is exactly what hierarchy + connectivity give);
    // branch on its domain values -> OR with variable-disjoint branches
    let root_var = atoms
        .iter()
        .map(|a| a.var_positions.keys().copied().collect::<BTreeSet<_>>())
        .reduce(|acc, vs| acc.intersection(&vs).copied().collect())
        .unwrap_or_default()
        .into_iter()
        .next()
        .ok_or_else(|| {
            Error::Precondition("read-once factorization requires a hierarchical query".into())
        })?;

    // group each atom's candidates by the root variable's value
    let mut grouped: Vec<BTreeMap<&Value, Vec<&Fact>>> = Vec::with_capacity(atoms.len());
    let mut domain: BTreeSet<&Value> = BTreeSet::new();
    for atom in atoms {
        let pos = atom.var_positions[root_var][0];
        let mut groups: BTreeMap<&Value, Vec<&Fact>> = BTreeMap::new();
        for f in &atom.candidates {
            let v = &f.values[pos];
            groups.entry(v).or_default().push(f);
            domain.insert(v);
        }
        grouped.push(groups);
    }

    let mut branches = Vec::with_capacity(domain.len());
    for value in domain {
        let residual: Vec<AtomState<'_>> = atoms
            .iter()
            .zip(&grouped)
            .map(|(atom, groups)| AtomState {
                var_positions: atom
                    .var_positions
                    .iter()
                    .filter(|(v, _)| **v != root_var)
                    .map(|(v, p)| (*v, p.clone()))
                    .collect(),
                candidates: groups.get(value).cloned().unwrap_or_default(),
            })
            .collect();
        branches.push(build(&residual)?);
    }
    Ok(or_of(branches))
}

fn connected_components<'s, 'a>(atoms: &'s [AtomState<'a>]) -> Vec<Vec<AtomState<'a>>>
where
    'a: 's,
{
    let n = atoms.len();
    let mut component = vec![usize::MAX; n];
    let mut next = 0;
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        component[start] = next;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if component[j] == usize::MAX
                    && atoms[i]
                        .var_positions
                        .keys()
                        .any(|v| atoms[j].var_positions.contains_key(v))
                {
                    component[j] = next;
                    stack.push(j);
                }
            }
        }
        next += 1;
    }
    let mut parts: Vec<Vec<AtomState<'a>>> = (0..next).map(|_| Vec::new()).collect();
    for (i, atom) in atoms.iter().enumerate() {
        parts[component[i]].push(AtomState {
            var_positions: atom.var_positions.clone(),
            candidates: atom.candidates.clone(),
        });
    }
    parts
}

/// Read-once factorization of a self-join-free hierarchical CQ on `db`.
/// The circuit value on an endogenous truth assignment E equals
/// q(E ∪ exogenous facts). Exogenous matches appear as constants.
pub fn factorize_read_once_cq(cq: &Cq, db: &Database) -> Result<LineageCircuit> {
    let shape = classify_cq(cq);
    if !shape.self_join_free || !shape.hierarchical {
        return Err(Error::Precondition(format!(
            "read-once factorization needs a self-join-free hierarchical CQ \
             (self_join_free={}, hierarchical={})",
            shape.self_join_free, shape.hierarchical
        )));
    }
    let states: Vec<AtomState<'_>> = cq
        .atoms
        .iter()
        .map(|a| AtomState::from_atom(a, db))
        .collect();
    LineageCircuit::verified(build(&states)?)
}

/// Read-once factorization of a UCQ whose disjuncts are self-join-free,
/// hierarchical and pairwise relation-disjoint: the disjunction of
/// independent read-once circuits is again read-once.
pub fn factorize_read_once(q: &Ucq, db: &Database) -> Result<LineageCircuit> {
    let mut seen_relations: BTreeSet<&str> = BTreeSet::new();
    for cq in &q.disjuncts {
        for rel in cq.relations() {
            if !seen_relations.insert(rel) {
                return Err(Error::Precondition(format!(
                    "read-once factorization of a union needs pairwise \
                     relation-disjoint disjuncts; relation {rel} repeats"
                )));
            }
        }
    }
    let children = q
        .disjuncts
        .iter()
        .map(|cq| factorize_read_once_cq(cq, db).map(|lc| lc.root))
        .collect::<Result<Vec<_>>>()?;
    LineageCircuit::verified(or_of(children))
}
