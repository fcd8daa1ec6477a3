//! Text front end for the three input formats.
//!
//! Fact file, one fact per line:
//! ```text
//! # endogenous facts are game players, exogenous facts are held fixed
//! endo R(1, a)
//! exo  S(b)
//! ```
//!
//! Query file, datalog-style Boolean rules; several rules form a union:
//! ```text
//! q() :- R(x, y), S(x)
//! q() :- T(x)
//! ```
//! Bare identifiers in query bodies are variables; integers and quoted
//! strings are constants (fact files are the opposite: a bare token is a
//! string value, since facts are ground).
//!
//! FD file, one dependency per line, attributes named positionally
//! `A`..`Z` (column 26 onward is written `C26`, `C27`, ...):
//! ```text
//! R: A -> B
//! R: A C -> D
//! ```

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::relational::{Atom, Cq, Database, Fd, Provenance, Term, Ucq, Value};

/// Name of the attribute at 0-based position `i`.
pub fn attribute_name(i: usize) -> String {
    if i < 26 {
        char::from(b'A' + i as u8).to_string()
    } else {
        format!("C{i}")
    }
}

/// Inverse of [`attribute_name`]. Accepts `A`..`Z` and `C<n>`.
pub fn attribute_index(name: &str) -> Option<usize> {
    let mut chars = name.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) if c.is_ascii_uppercase() => Some((c as u8 - b'A') as usize),
        (Some('C'), Some(_)) => name[1..].parse().ok(),
        _ => None,
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    }
}

/// Splits `R(t1,...,tk)` into the relation name and raw argument tokens.
fn split_atom(s: &str) -> Option<(&str, Vec<&str>)> {
    let open = s.find('(')?;
    let close = s.rfind(')')?;
    if close != s.len() - 1 || close < open {
        return None;
    }
    let name = s[..open].trim();
    if name.is_empty() || !is_identifier(name) {
        return None;
    }
    let inner = s[open + 1..close].trim();
    let args = if inner.is_empty() {
        Vec::new()
    } else {
        inner.split(',').map(str::trim).collect()
    };
    if args.iter().any(|a| a.is_empty()) {
        return None;
    }
    Some((name, args))
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A ground value in a fact file: integer, quoted string, or bare token
/// (which is a string value).
fn parse_value(tok: &str, line: usize) -> Result<Value> {
    if let Ok(i) = tok.parse::<i64>() {
        return Ok(Value::Int(i));
    }
    if let Some(q) = parse_quoted(tok) {
        return Ok(Value::Str(q));
    }
    if is_identifier(tok) {
        return Ok(Value::Str(tok.to_owned()));
    }
    Err(Error::parse(line, format!("malformed value {tok:?}")))
}

fn parse_quoted(tok: &str) -> Option<String> {
    let bytes = tok.as_bytes();
    if bytes.len() >= 2 {
        let q = bytes[0];
        if (q == b'"' || q == b'\'') && bytes[bytes.len() - 1] == q {
            return Some(tok[1..tok.len() - 1].to_owned());
        }
    }
    None
}

/// Parses a fact file into a [`Database`]. The schema is inferred from the
/// first occurrence of each relation; later arity conflicts and duplicate
/// tuples are reported with their line number.
pub fn parse_database(text: &str) -> Result<Database> {
    let mut db = Database::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let (tag, rest) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| Error::parse(line_no, "expected `endo R(...)` or `exo R(...)`"))?;
        let provenance = match tag {
            "endo" => Provenance::Endogenous,
            "exo" => Provenance::Exogenous,
            other => {
                return Err(Error::parse(
                    line_no,
                    format!("unknown provenance tag {other:?} (expected endo/exo)"),
                ))
            }
        };
        let (relation, args) = split_atom(rest.trim())
            .ok_or_else(|| Error::parse(line_no, format!("malformed fact {rest:?}")))?;
        let values = args
            .iter()
            .map(|a| parse_value(a, line_no))
            .collect::<Result<Vec<_>>>()?;
        db.add_fact(relation, values, provenance)
            .map_err(|e| Error::parse(line_no, e.to_string()))?;
    }
    Ok(db)
}

fn parse_term(tok: &str, line: usize) -> Result<Term> {
    if let Ok(i) = tok.parse::<i64>() {
        return Ok(Term::Const(Value::Int(i)));
    }
    if let Some(q) = parse_quoted(tok) {
        return Ok(Term::Const(Value::Str(q)));
    }
    if is_identifier(tok) {
        return Ok(Term::Var(tok.to_owned()));
    }
    Err(Error::parse(line, format!("malformed term {tok:?}")))
}

/// Parses a query file into a Boolean [`Ucq`], one disjunct per rule in
/// file order. All rules must share the same zero-arity head.
pub fn parse_query(text: &str) -> Result<Ucq> {
    let mut disjuncts = Vec::new();
    let mut head_name: Option<String> = None;
    let mut arities: BTreeMap<String, usize> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let mut line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        line = line.strip_suffix('.').unwrap_or(line).trim_end();
        let (head, body) = line
            .split_once(":-")
            .ok_or_else(|| Error::parse(line_no, "expected `head() :- body`"))?;
        let (hname, hargs) = split_atom(head.trim())
            .ok_or_else(|| Error::parse(line_no, format!("malformed head {:?}", head.trim())))?;
        if !hargs.is_empty() {
            return Err(Error::parse(
                line_no,
                "only Boolean queries are accepted: head must have no arguments",
            ));
        }
        match &head_name {
            Some(h) if h != hname => {
                return Err(Error::parse(
                    line_no,
                    format!("head {hname:?} differs from earlier head {h:?}"),
                ))
            }
            Some(_) => {}
            None => head_name = Some(hname.to_owned()),
        }
        let mut atoms = Vec::new();
        for part in split_top_level_commas(body.trim()) {
            let part = part.trim();
            let (rel, args) = split_atom(part)
                .ok_or_else(|| Error::parse(line_no, format!("malformed atom {part:?}")))?;
            if let Some(&known) = arities.get(rel) {
                if known != args.len() {
                    return Err(Error::parse(
                        line_no,
                        format!(
                            "arity conflict for relation {rel}: {} vs {known}",
                            args.len()
                        ),
                    ));
                }
            } else {
                arities.insert(rel.to_owned(), args.len());
            }
            let terms = args
                .iter()
                .map(|a| parse_term(a, line_no))
                .collect::<Result<Vec<_>>>()?;
            atoms.push(Atom {
                relation: rel.to_owned(),
                terms,
            });
        }
        if atoms.is_empty() {
            return Err(Error::parse(line_no, "rule body is empty"));
        }
        disjuncts.push(Cq { atoms });
    }
    if disjuncts.is_empty() {
        return Err(Error::Input("query file contains no rules".into()));
    }
    Ok(Ucq { disjuncts })
}

/// Splits a rule body on commas that are not inside parentheses.
fn split_top_level_commas(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

/// Parses an FD file (`R: A B -> C D` per line) preserving order. An empty
/// left-hand side (`R: -> B`) is a constant constraint and is accepted; an
/// empty right-hand side is an error. Attribute indices are validated
/// against the database schema separately, by [`validate_fds`].
///
/// [`validate_fds`]: crate::relational::validate_fds
pub fn parse_fds(text: &str) -> Result<Vec<Fd>> {
    let mut fds = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let (rel, rest) = line
            .split_once(':')
            .ok_or_else(|| Error::parse(line_no, "expected `R: A B -> C`"))?;
        let rel = rel.trim();
        if !is_identifier(rel) {
            return Err(Error::parse(
                line_no,
                format!("malformed relation name {rel:?}"),
            ));
        }
        let (lhs_txt, rhs_txt) = rest
            .split_once("->")
            .ok_or_else(|| Error::parse(line_no, "missing `->` in dependency"))?;
        let parse_side = |side: &str| -> Result<Vec<usize>> {
            side.split_whitespace()
                .map(|tok| {
                    attribute_index(tok)
                        .ok_or_else(|| Error::parse(line_no, format!("unknown attribute {tok:?}")))
                })
                .collect()
        };
        let lhs = parse_side(lhs_txt)?;
        let rhs = parse_side(rhs_txt)?;
        if rhs.is_empty() {
            return Err(Error::parse(
                line_no,
                "right-hand side of dependency is empty",
            ));
        }
        fds.push(Fd::new(rel, lhs, rhs));
    }
    Ok(fds)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fact_file_round_trip() {
        let db = parse_database("endo R(1,a)\nexo S(a)").unwrap();
        assert_eq!(db.len(), 2);
        assert_eq!(db.endogenous().count(), 1);
        assert_eq!(db.exogenous().count(), 1);
        assert_eq!(db.fact(0).unwrap().to_string(), "R(1,a)");
    }

    #[test]
    fn empty_input_is_empty_database() {
        let db = parse_database("").unwrap();
        assert!(db.is_empty());
    }

    #[test]
    fn arity_mismatch_reports_line() {
        let err = parse_database("endo R(1)\nendo R(1,2)").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(err.to_string().contains("arity mismatch"), "{err}");
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let db = parse_database("# header\n\nendo R(1) # trailing\n").unwrap();
        assert_eq!(db.len(), 1);
    }

    #[test]
    fn query_single_rule() {
        let q = parse_query("q() :- R(x,y), S(x)").unwrap();
        assert_eq!(q.disjuncts.len(), 1);
        assert_eq!(q.disjuncts[0].atoms.len(), 2);
        assert_eq!(q.disjuncts[0].variables().len(), 2);
    }

    #[test]
    fn query_two_rules_form_union() {
        let q = parse_query("q() :- R(x)\nq() :- S(x)").unwrap();
        assert_eq!(q.disjuncts.len(), 2);
    }

    #[test]
    fn query_head_variable_rejected() {
        let err = parse_query("q(x) :- R(x)").unwrap_err();
        assert!(err.to_string().contains("Boolean"), "{err}");
    }

    #[test]
    fn query_arity_conflict_rejected() {
        let err = parse_query("q() :- R(x), R(x,y)").unwrap_err();
        assert!(err.to_string().contains("arity conflict"), "{err}");
    }

    #[test]
    fn query_constants() {
        let q = parse_query("q() :- R(x, 1, \"a\")").unwrap();
        let terms = &q.disjuncts[0].atoms[0].terms;
        assert_eq!(terms[0], Term::Var("x".into()));
        assert_eq!(terms[1], Term::Const(Value::Int(1)));
        assert_eq!(terms[2], Term::Const(Value::Str("a".into())));
    }

    #[test]
    fn fd_basic() {
        let fds = parse_fds("R: A -> B").unwrap();
        assert_eq!(fds.len(), 1);
        assert_eq!(fds[0].to_string(), "R: A -> B");
    }

    #[test]
    fn fd_order_preserved() {
        let fds = parse_fds("R: A -> B\nR: B -> A").unwrap();
        assert_eq!(fds.len(), 2);
        assert_eq!(fds[1].to_string(), "R: B -> A");
    }

    #[test]
    fn fd_empty_lhs_accepted_empty_rhs_rejected() {
        let fds = parse_fds("R: -> B").unwrap();
        assert!(fds[0].lhs.is_empty());
        assert!(parse_fds("R: A ->").is_err());
    }

    #[test]
    fn attribute_names_round_trip() {
        for i in [0, 5, 25, 26, 40, 700] {
            assert_eq!(attribute_index(&attribute_name(i)), Some(i));
        }
        assert_eq!(attribute_name(0), "A");
        assert_eq!(attribute_name(26), "C26");
    }
}
