//! Schema-light relational model: facts, databases, queries, functional
//! dependencies and the conflict graph they induce.

mod conflict;
mod parse;
mod query;

pub use conflict::{conflict_graph, validate_fds, ConflictGraph, Fd};
pub use parse::{attribute_index, attribute_name, parse_database, parse_fds, parse_query};
pub use query::{
    classify_cq, eval_boolean, eval_boolean_with, witnesses, Atom, Cq, CqShape, Term, Ucq,
};

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Dense fact identifier, assigned in insertion order starting at 0.
pub type FactId = u64;

/// An atomic attribute value. Integers and symbols are distinct domains:
/// `1` and `"1"` never compare equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Int(i64),
    Str(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Str(s) => {
                let bare = !s.is_empty()
                    && s.chars()
                        .next()
                        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                    && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
                if bare {
                    write!(f, "{s}")
                } else {
                    write!(f, "{s:?}")
                }
            }
        }
    }
}

/// Whether a fact takes part in attribution games or is held fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Endogenous,
    Exogenous,
}

/// One ground tuple of the database.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fact {
    pub id: FactId,
    pub relation: String,
    pub values: Vec<Value>,
    pub provenance: Provenance,
}

impl Fact {
    pub fn is_endogenous(&self) -> bool {
        self.provenance == Provenance::Endogenous
    }
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.relation)?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Relation name -> arity, inferred from the first occurrence of each
/// relation. Arity conflicts are hard errors.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Schema {
    arities: BTreeMap<String, usize>,
}

impl Schema {
    pub fn arity(&self, relation: &str) -> Option<usize> {
        self.arities.get(relation).copied()
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, usize)> {
        self.arities.iter().map(|(r, &a)| (r.as_str(), a))
    }

    fn record(&mut self, relation: &str, arity: usize) -> Result<()> {
        match self.arities.get(relation) {
            Some(&known) if known != arity => Err(Error::Input(format!(
                "arity mismatch for relation {relation}: saw {arity}, expected {known}"
            ))),
            Some(_) => Ok(()),
            None => {
                self.arities.insert(relation.to_owned(), arity);
                Ok(())
            }
        }
    }
}

/// A database: inferred schema plus a set of distinct facts, each flagged
/// endogenous or exogenous.
#[derive(Debug, Clone, Default)]
pub struct Database {
    schema: Schema,
    facts: Vec<Fact>,
}

impl Database {
    pub fn new() -> Self {
        Database::default()
    }

    /// Adds a fact, inferring or checking the relation arity. Duplicate
    /// tuples (same relation and values, either provenance) are rejected:
    /// facts form a set and each tuple is a single player.
    pub fn add_fact(
        &mut self,
        relation: &str,
        values: Vec<Value>,
        provenance: Provenance,
    ) -> Result<FactId> {
        self.schema.record(relation, values.len())?;
        if self
            .facts
            .iter()
            .any(|f| f.relation == relation && f.values == values)
        {
            return Err(Error::Input(format!(
                "duplicate fact {relation}({})",
                values
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            )));
        }
        let id = self.facts.len() as FactId;
        self.facts.push(Fact {
            id,
            relation: relation.to_owned(),
            values,
            provenance,
        });
        Ok(id)
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn facts(&self) -> &[Fact] {
        &self.facts
    }

    pub fn fact(&self, id: FactId) -> Option<&Fact> {
        self.facts.get(id as usize)
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn endogenous(&self) -> impl Iterator<Item = &Fact> {
        self.facts
            .iter()
            .filter(|f| f.provenance == Provenance::Endogenous)
    }

    pub fn exogenous(&self) -> impl Iterator<Item = &Fact> {
        self.facts
            .iter()
            .filter(|f| f.provenance == Provenance::Exogenous)
    }

    /// Ids of the endogenous facts, ascending.
    pub fn endogenous_ids(&self) -> Vec<FactId> {
        self.endogenous().map(|f| f.id).collect()
    }
}
