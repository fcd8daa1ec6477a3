//! Size-stratified model counting over read-once circuits, and the exact
//! polynomial Shapley engine built on top of it.
//!
//! For a circuit over n variables, `counts[k]` is the number of satisfying
//! assignments that set exactly k variables true. Read-onceness makes the
//! counts compositional: AND convolves the children's model counts, OR
//! convolves the children's non-model counts and subtracts from the
//! binomial totals. Scope variables outside the circuit contribute a free
//! binomial factor.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::relational::{Database, FactId};
use crate::shapq::lineage::{Circuit, LineageCircuit};

/// Per-cardinality model counts over a fixed variable scope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeCounts {
    /// counts[k] = satisfying assignments with exactly k true variables
    pub counts: Vec<BigInt>,
    /// number of scope variables (counts has length scope_size + 1)
    pub scope_size: usize,
}

/// Row k -> C(n, k) of Pascal's triangle.
pub(crate) fn binomial_row(n: usize) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n + 1);
    row.push(BigInt::one());
    for k in 0..n {
        let next = &row[k] * BigInt::from(n - k) / BigInt::from(k + 1);
        row.push(next);
    }
    row
}

/// 0! ..= n! .
pub(crate) fn factorials(n: usize) -> Vec<BigInt> {
    let mut f = Vec::with_capacity(n + 1);
    f.push(BigInt::one());
    for k in 1..=n {
        let next = &f[k - 1] * BigInt::from(k);
        f.push(next);
    }
    f
}

fn convolve(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            out[i + j] += x * y;
        }
    }
    out
}

/// Bottom-up counting; returns (model counts, variable count) of the node.
fn count_node(node: &Circuit) -> (Vec<BigInt>, usize) {
    match node {
        Circuit::Const(true) => (vec![BigInt::one()], 0),
        Circuit::Const(false) => (vec![BigInt::zero()], 0),
        Circuit::Var(_) => (vec![BigInt::zero(), BigInt::one()], 1),
        Circuit::And(children) => {
            let mut models = vec![BigInt::one()];
            let mut vars = 0;
            for c in children {
                let (m, v) = count_node(c);
                models = convolve(&models, &m);
                vars += v;
            }
            (models, vars)
        }
        Circuit::Or(children) => {
            let mut nonmodels = vec![BigInt::one()];
            let mut vars = 0;
            for c in children {
                let (m, v) = count_node(c);
                let binom = binomial_row(v);
                let nm: Vec<BigInt> = binom.iter().zip(&m).map(|(b, x)| b - x).collect();
                nonmodels = convolve(&nonmodels, &nm);
                vars += v;
            }
            let binom = binomial_row(vars);
            let models = binom.iter().zip(&nonmodels).map(|(b, x)| b - x).collect();
            (models, vars)
        }
    }
}

/// Size-stratified model counts of a read-once circuit over `scope`,
/// which must contain every circuit variable.
pub fn size_stratified_counts(c: &LineageCircuit, scope: &BTreeSet<FactId>) -> Result<SizeCounts> {
    if !c.read_once {
        return Err(Error::Precondition(
            "size-stratified counting needs a read-once circuit".into(),
        ));
    }
    if !c.vars.is_subset(scope) {
        return Err(Error::Precondition(
            "counting scope must contain all circuit variables".into(),
        ));
    }
    let (mut counts, vars) = count_node(&c.root);
    let free = scope.len() - vars;
    if free > 0 {
        counts = convolve(&counts, &binomial_row(free));
    }
    debug_assert_eq!(counts.len(), scope.len() + 1);
    Ok(SizeCounts {
        counts,
        scope_size: scope.len(),
    })
}

/// Exact Shapley value of the endogenous fact `f` from conditioned counts:
///
///   value = Σ_k  k! (n−k−1)! / n!  ·  (C1ₖ − C0ₖ)
///
/// where n is the number of endogenous facts and C1/C0 count the
/// satisfying assignments of the lineage conditioned on f being present /
/// absent, stratified by size over the remaining endogenous facts.
pub fn shapley_from_circuit(
    circuit: &LineageCircuit,
    db: &Database,
    f: FactId,
) -> Result<BigRational> {
    let endo = db.endogenous_ids();
    let n = endo.len();
    let mut scope: BTreeSet<FactId> = endo.into_iter().collect();
    if !scope.remove(&f) {
        return Err(Error::Input(format!("fact {f} is not endogenous")));
    }
    let c1 = size_stratified_counts(&circuit.condition(f, true), &scope)?;
    let c0 = size_stratified_counts(&circuit.condition(f, false), &scope)?;

    let fact = factorials(n);
    let mut numerator = BigInt::zero();
    for k in 0..n {
        let delta = &c1.counts[k] - &c0.counts[k];
        if !delta.is_zero() {
            numerator += &fact[k] * &fact[n - 1 - k] * delta;
        }
    }
    Ok(BigRational::new(numerator, fact[n].clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relational::{parse_database, parse_query};
    use crate::shapq::lineage::factorize_read_once;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn wrap(root: Circuit) -> LineageCircuit {
        let mut vars = Vec::new();
        fn collect(c: &Circuit, into: &mut Vec<FactId>) {
            match c {
                Circuit::Var(f) => into.push(*f),
                Circuit::And(ch) | Circuit::Or(ch) => ch.iter().for_each(|c| collect(c, into)),
                Circuit::Const(_) => {}
            }
        }
        collect(&root, &mut vars);
        LineageCircuit {
            root,
            vars: vars.into_iter().collect(),
            read_once: true,
        }
    }

    #[test]
    fn and_counts() {
        let c = wrap(Circuit::And(vec![Circuit::Var(0), Circuit::Var(1)]));
        let counts = size_stratified_counts(&c, &BTreeSet::from([0, 1])).unwrap();
        assert_eq!(counts.counts, ints(&[0, 0, 1]));
    }

    #[test]
    fn or_counts() {
        let c = wrap(Circuit::Or(vec![Circuit::Var(0), Circuit::Var(1)]));
        let counts = size_stratified_counts(&c, &BTreeSet::from([0, 1])).unwrap();
        assert_eq!(counts.counts, ints(&[0, 2, 1]));
    }

    #[test]
    fn constant_true_gives_binomials() {
        let c = wrap(Circuit::Const(true));
        let counts = size_stratified_counts(&c, &BTreeSet::from([0, 1, 2])).unwrap();
        assert_eq!(counts.counts, ints(&[1, 3, 3, 1]));
    }

    #[test]
    fn free_scope_variables_multiply_binomially() {
        let c = wrap(Circuit::Var(0));
        let counts = size_stratified_counts(&c, &BTreeSet::from([0, 7, 8])).unwrap();
        // var true, 2 free vars: 1*C(2,k-1)
        assert_eq!(counts.counts, ints(&[0, 1, 2, 1]));
    }

    #[test]
    fn scope_must_cover_circuit() {
        let c = wrap(Circuit::Var(3));
        assert!(size_stratified_counts(&c, &BTreeSet::from([0])).is_err());
    }

    #[test]
    fn running_example_conditioned_counts_and_value() {
        let db = parse_database("endo R(a)\nendo S(a)\nendo R(b)").unwrap();
        let q = parse_query("q() :- R(x), S(x)").unwrap();
        let circuit = factorize_read_once(&q, &db).unwrap();

        let scope = BTreeSet::from([1, 2]);
        let c1 = size_stratified_counts(&circuit.condition(0, true), &scope).unwrap();
        let c0 = size_stratified_counts(&circuit.condition(0, false), &scope).unwrap();
        assert_eq!(c1.counts, ints(&[0, 1, 1]));
        assert_eq!(c0.counts, ints(&[0, 0, 0]));

        let v = shapley_from_circuit(&circuit, &db, 0).unwrap();
        assert_eq!(v, BigRational::new(1.into(), 2.into()));
        // R(b) is a null player; S(a) mirrors R(a)
        assert!(shapley_from_circuit(&circuit, &db, 2).unwrap().is_zero());
        assert_eq!(
            shapley_from_circuit(&circuit, &db, 1).unwrap(),
            BigRational::new(1.into(), 2.into())
        );
    }

    #[test]
    fn sole_counterfactual_fact_gets_one() {
        let db = parse_database("endo R(a)\nexo S(a)").unwrap();
        let q = parse_query("q() :- R(x), S(x)").unwrap();
        let circuit = factorize_read_once(&q, &db).unwrap();
        assert_eq!(
            shapley_from_circuit(&circuit, &db, 0).unwrap(),
            BigRational::one()
        );
    }

    #[test]
    fn binomial_row_values() {
        assert_eq!(binomial_row(4), ints(&[1, 4, 6, 4, 1]));
        assert_eq!(binomial_row(0), ints(&[1]));
    }
}
