//! Functional dependencies and the conflict graph of their pairwise
//! violations. For FDs every minimal inconsistent subset is a pair of
//! facts, so the graph carries all the structure the inconsistency
//! measures need.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::relational::parse::attribute_name;
use crate::relational::{Database, FactId, Value};

/// A functional dependency `R: X -> Y` with positional attribute sets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Fd {
    pub relation: String,
    pub lhs: BTreeSet<usize>,
    pub rhs: BTreeSet<usize>,
}

impl Fd {
    pub fn new(
        relation: &str,
        lhs: impl IntoIterator<Item = usize>,
        rhs: impl IntoIterator<Item = usize>,
    ) -> Self {
        Fd {
            relation: relation.to_owned(),
            lhs: lhs.into_iter().collect(),
            rhs: rhs.into_iter().collect(),
        }
    }
}

impl fmt::Display for Fd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.relation)?;
        for a in &self.lhs {
            write!(f, " {}", attribute_name(*a))?;
        }
        write!(f, " ->")?;
        for a in &self.rhs {
            write!(f, " {}", attribute_name(*a))?;
        }
        Ok(())
    }
}

/// Checks that every FD references a relation present in the database
/// schema with attribute positions inside its arity.
pub fn validate_fds(db: &Database, fds: &[Fd]) -> Result<()> {
    for fd in fds {
        let Some(arity) = db.schema().arity(&fd.relation) else {
            // a dependency on an absent relation constrains nothing
            continue;
        };
        for &a in fd.lhs.iter().chain(&fd.rhs) {
            if a >= arity {
                return Err(Error::Input(format!(
                    "attribute {} not in schema of relation {} (arity {arity})",
                    attribute_name(a),
                    fd.relation
                )));
            }
        }
    }
    Ok(())
}

/// Undirected graph over fact ids; an edge joins two facts of the same
/// relation that jointly violate some FD (agree on its lhs, differ on its
/// rhs). The database satisfies the FD set iff the edge set is empty.
#[derive(Debug, Clone)]
pub struct ConflictGraph {
    num_facts: usize,
    adjacency: Vec<BTreeSet<FactId>>,
    edges: BTreeSet<(FactId, FactId)>,
}

impl ConflictGraph {
    pub fn num_facts(&self) -> usize {
        self.num_facts
    }

    /// Edges as ordered pairs (lo, hi).
    pub fn edges(&self) -> impl Iterator<Item = (FactId, FactId)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, f: FactId, g: FactId) -> bool {
        let key = if f <= g { (f, g) } else { (g, f) };
        self.edges.contains(&key)
    }

    pub fn degree(&self, f: FactId) -> usize {
        self.adjacency.get(f as usize).map_or(0, BTreeSet::len)
    }

    pub fn neighbors(&self, f: FactId) -> impl Iterator<Item = FactId> + '_ {
        self.adjacency
            .get(f as usize)
            .into_iter()
            .flat_map(|s| s.iter().copied())
    }

    pub fn is_consistent(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Builds the conflict graph of `db` under `fds`. Dependencies on relations
/// absent from the schema produce no edges; attribute positions are assumed
/// valid (see [`validate_fds`]).
pub fn conflict_graph(db: &Database, fds: &[Fd]) -> ConflictGraph {
    let mut adjacency = vec![BTreeSet::new(); db.len()];
    let mut edges = BTreeSet::new();
    for fd in fds {
        // group facts of the relation by their lhs projection
        let mut groups: HashMap<Vec<&Value>, Vec<&crate::relational::Fact>> = HashMap::new();
        for fact in db.facts().iter().filter(|f| f.relation == fd.relation) {
            let Some(key) = project(fact, &fd.lhs) else {
                continue;
            };
            groups.entry(key).or_default().push(fact);
        }
        for group in groups.values() {
            for (i, f) in group.iter().enumerate() {
                for g in &group[i + 1..] {
                    let (pf, pg) = (project(f, &fd.rhs), project(g, &fd.rhs));
                    if pf.is_some() && pf != pg {
                        let key = if f.id <= g.id {
                            (f.id, g.id)
                        } else {
                            (g.id, f.id)
                        };
                        if edges.insert(key) {
                            adjacency[f.id as usize].insert(g.id);
                            adjacency[g.id as usize].insert(f.id);
                        }
                    }
                }
            }
        }
    }
    ConflictGraph {
        num_facts: db.len(),
        adjacency,
        edges,
    }
}

fn project<'a>(
    fact: &'a crate::relational::Fact,
    attrs: &BTreeSet<usize>,
) -> Option<Vec<&'a Value>> {
    attrs.iter().map(|&a| fact.values.get(a)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relational::{parse_database, parse_fds};

    #[test]
    fn single_violating_pair() {
        let db = parse_database("endo R(1,a)\nendo R(1,b)\nendo R(2,c)").unwrap();
        let fds = parse_fds("R: A -> B").unwrap();
        let g = conflict_graph(&db, &fds);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1)]);
        assert_eq!(g.degree(2), 0);
    }

    #[test]
    fn consistent_database_has_no_edges() {
        let db = parse_database("endo R(1,a)\nendo R(2,a)").unwrap();
        let g = conflict_graph(&db, &parse_fds("R: A -> B").unwrap());
        assert!(g.is_consistent());
    }

    #[test]
    fn empty_fd_set_has_no_edges() {
        let db = parse_database("endo R(1,a)\nendo R(1,b)").unwrap();
        let g = conflict_graph(&db, &[]);
        assert!(g.is_consistent());
    }

    #[test]
    fn empty_lhs_is_a_constant_constraint() {
        let db = parse_database("endo R(a)\nendo R(b)\nendo R2(a)").unwrap();
        let g = conflict_graph(&db, &parse_fds("R: -> A").unwrap());
        assert_eq!(g.edge_count(), 1);
        assert!(g.has_edge(0, 1));
    }

    #[test]
    fn fd_on_absent_relation_is_vacuous() {
        let db = parse_database("endo R(a)").unwrap();
        let fds = parse_fds("Missing: A -> B").unwrap();
        assert!(validate_fds(&db, &fds).is_ok());
        assert!(conflict_graph(&db, &fds).is_consistent());
    }

    #[test]
    fn out_of_range_attribute_rejected_by_validation() {
        let db = parse_database("endo R(a)").unwrap();
        let fds = parse_fds("R: A -> B").unwrap();
        assert!(validate_fds(&db, &fds).is_err());
    }
}
