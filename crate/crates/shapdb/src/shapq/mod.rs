//! Attribution of endogenous facts to a Boolean query answer.
//!
//! The game: players are the endogenous facts, the utility of a coalition
//! E is q(E ∪ exogenous) − q(exogenous). Engines, from cheapest to most
//! general: the read-once hierarchical engine (exact, polynomial, for
//! self-join-free hierarchical queries), the generic exact engines from
//! the Shapley kernel, and the Monte-Carlo estimators.

mod counting;
mod lineage;

pub use counting::{shapley_from_circuit, size_stratified_counts, SizeCounts};
pub use lineage::{
    eval_dnf, factorize_read_once, factorize_read_once_cq, lineage_dnf, Circuit, LineageCircuit,
};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::relational::{
    classify_cq, eval_boolean, eval_boolean_with, witnesses, Cq, CqShape, Database, FactId,
    Provenance, Ucq,
};
use crate::shapley::{
    estimate_additive, estimate_multiplicative, shapley_exact_permutations, shapley_exact_subsets,
    Coalition, CoalitionGame, EngineKind, PlayerId, Valuation, DEFAULT_PERMUTATION_CAP,
    DEFAULT_SUBSET_CAP,
};

/// The coalition game of a Boolean query over a database with an
/// endogenous/exogenous split.
pub struct QueryGame<'a> {
    query: &'a Ucq,
    db: &'a Database,
    players: Vec<PlayerId>,
    /// position of each fact id in `players`, or usize::MAX
    position: Vec<usize>,
    exo_satisfied: bool,
}

/// Builds the query game: players are the endogenous fact ids in id order,
/// utility(E) = q(E ∪ exogenous) − q(exogenous). The subtraction makes the
/// empty coalition worth zero by construction.
pub fn shapq_game<'a>(query: &'a Ucq, db: &'a Database) -> QueryGame<'a> {
    let players: Vec<PlayerId> = db.endogenous_ids();
    let mut position = vec![usize::MAX; db.len()];
    for (i, &p) in players.iter().enumerate() {
        position[p as usize] = i;
    }
    let exo_satisfied = eval_boolean_with(query, db, |f| f.provenance == Provenance::Exogenous);
    QueryGame {
        query,
        db,
        players,
        position,
        exo_satisfied,
    }
}

impl QueryGame<'_> {
    /// True iff the exogenous facts alone satisfy the query; in that case
    /// the utility is constantly zero.
    pub fn exogenous_satisfied(&self) -> bool {
        self.exo_satisfied
    }
}

impl CoalitionGame for QueryGame<'_> {
    fn players(&self) -> &[PlayerId] {
        &self.players
    }

    fn utility(&self, coalition: &Coalition) -> Result<BigRational> {
        if self.exo_satisfied {
            // unions of CQs are monotone: the query stays satisfied
            return Ok(BigRational::zero());
        }
        let sat = eval_boolean_with(self.query, self.db, |f| match f.provenance {
            Provenance::Exogenous => true,
            Provenance::Endogenous => {
                let pos = self.position[f.id as usize];
                pos != usize::MAX && coalition.contains(pos)
            }
        });
        Ok(if sat {
            BigRational::one()
        } else {
            BigRational::zero()
        })
    }
}

/// True iff `f` occurs in no minimal witness set of `q` on `db`. For
/// monotone queries this certifies a Shapley value of exactly zero, which
/// is what lets the multiplicative estimator skip the gap assumption.
pub fn null_player(q: &Ucq, db: &Database, f: FactId) -> Result<bool> {
    ensure_endogenous(db, f)?;
    Ok(witnesses(q, db).iter().all(|w| !w.contains(&f)))
}

fn ensure_endogenous(db: &Database, f: FactId) -> Result<()> {
    match db.fact(f) {
        Some(fact) if fact.is_endogenous() => Ok(()),
        Some(_) => Err(Error::Input(format!("fact {f} is exogenous, not a player"))),
        None => Err(Error::Input(format!("no fact with id {f}"))),
    }
}

/// Exact Shapley value of one endogenous fact through the read-once
/// engine. The query (every disjunct) must be self-join-free and
/// hierarchical, with pairwise relation-disjoint disjuncts.
pub fn shapq_exact_hierarchical(q: &Cq, db: &Database, f: FactId) -> Result<BigRational> {
    ensure_endogenous(db, f)?;
    let circuit = factorize_read_once_cq(q, db)?;
    shapley_from_circuit(&circuit, db, f)
}

/// Citation anchor for the dichotomy behind the hardness note of
/// [`classify_ucq`].
pub const QUERY_DICHOTOMY_CITATION: &str =
    "Livshits, Bertossi, Kimelfeld & Sebag, LMCS 2021: Shapley dichotomy for \
     self-join-free conjunctive queries";

/// Structural classification of a UCQ for engine dispatch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryClassification {
    pub disjuncts: Vec<CqShape>,
    pub relation_disjoint: bool,
    /// whether the read-once exact engine applies
    pub exact_polynomial: bool,
    /// a hardness statement, when one is licensed for this query family
    pub hardness: Option<String>,
}

/// Classifies every disjunct and decides whether the exact polynomial path
/// applies: all disjuncts self-join-free and hierarchical, and pairwise
/// relation-disjoint. The hardness note is emitted only for the family
/// with a known lower bound: a single self-join-free non-hierarchical CQ.
pub fn classify_ucq(q: &Ucq) -> QueryClassification {
    let disjuncts: Vec<CqShape> = q.disjuncts.iter().map(classify_cq).collect();
    let mut seen = std::collections::BTreeSet::new();
    let mut relation_disjoint = true;
    for cq in &q.disjuncts {
        for rel in cq.relations() {
            if !seen.insert(rel.to_owned()) {
                relation_disjoint = false;
            }
        }
    }
    let exact_polynomial =
        disjuncts.iter().all(|s| s.self_join_free && s.hierarchical) && relation_disjoint;
    let hardness = match (q.disjuncts.len(), disjuncts.first()) {
        (1, Some(shape)) if shape.self_join_free && !shape.hierarchical => Some(
            "exact computation for this query is FP^#P-hard in data complexity \
             (dichotomy for self-join-free CQs, Livshits, Bertossi, Kimelfeld & Sebag, \
             LMCS 2021)"
                .to_owned(),
        ),
        _ => None,
    };
    QueryClassification {
        disjuncts,
        relation_disjoint,
        exact_polynomial,
        hardness,
    }
}

/// Engine selection for a dispatch call.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EngineChoice {
    #[default]
    Auto,
    BrutePermutations,
    BruteSubsets,
    Hierarchical,
    ClosedForm,
    Sample,
}

/// Additive or multiplicative sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ApproxMode {
    #[default]
    Additive,
    Multiplicative,
}

/// Knobs shared by the attribution dispatchers.
#[derive(Debug, Clone)]
pub struct DispatchConfig {
    pub engine: EngineChoice,
    pub approx: ApproxMode,
    pub epsilon: f64,
    pub delta: f64,
    /// multiplicative gap; None selects the heuristic default 1/(n(n−1))
    pub gap: Option<f64>,
    pub seed: u64,
    pub permutation_cap: usize,
    pub subset_cap: usize,
}

impl Default for DispatchConfig {
    fn default() -> Self {
        DispatchConfig {
            engine: EngineChoice::Auto,
            approx: ApproxMode::Additive,
            epsilon: 0.1,
            delta: 0.1,
            gap: None,
            seed: 0,
            permutation_cap: DEFAULT_PERMUTATION_CAP,
            subset_cap: DEFAULT_SUBSET_CAP,
        }
    }
}

/// Result of a query-attribution dispatch.
#[derive(Debug, Clone)]
pub struct ShapqRun {
    pub classification: QueryClassification,
    pub engine: EngineKind,
    /// (fact id, value) for each requested fact, in ascending id order
    pub entries: Vec<(FactId, Valuation)>,
    /// q(D) − q(exogenous) as a rational: the quantity exact values sum to
    pub wealth: BigRational,
    /// true when the exogenous part alone satisfies the query
    pub exo_satisfied: bool,
    /// set when the heuristic default gap was used
    pub gap_defaulted: bool,
}

fn default_gap(n: usize) -> f64 {
    if n >= 2 {
        1.0 / (n as f64 * (n - 1) as f64)
    } else {
        1.0
    }
}

/// Computes Shapley values for the selected endogenous facts (all of them
/// when `selection` is None), picking an engine per the configuration.
///
/// `engine = Auto` prefers the read-once exact engine when the
/// classification permits, falls back to the subset engine while the
/// player count fits its cap, and samples beyond that. Multiplicative
/// sampling first certifies zeros through [`null_player`]; for the rest it
/// relies on the gap assumption, defaulting to the heuristic 1/(n(n−1))
/// when no gap is configured.
pub fn shapq_dispatch(
    q: &Ucq,
    db: &Database,
    selection: Option<&[FactId]>,
    cfg: &DispatchConfig,
) -> Result<ShapqRun> {
    let game = shapq_game(q, db);
    let all_players = game.players().to_vec();
    let selected: Vec<FactId> = match selection {
        Some(ids) => {
            let mut ids = ids.to_vec();
            ids.sort_unstable();
            ids.dedup();
            for &f in &ids {
                ensure_endogenous(db, f)?;
            }
            ids
        }
        None => all_players.clone(),
    };
    let n = all_players.len();
    let classification = classify_ucq(q);
    let wealth = if eval_boolean(q, db) && !game.exogenous_satisfied() {
        BigRational::one()
    } else {
        BigRational::zero()
    };

    // the exogenous part already satisfies the query: the game is
    // constantly zero and every value is exactly 0
    if game.exogenous_satisfied() {
        return Ok(ShapqRun {
            classification,
            engine: EngineKind::TrivialZero,
            entries: selected
                .into_iter()
                .map(|f| (f, Valuation::Exact(BigRational::zero())))
                .collect(),
            wealth,
            exo_satisfied: true,
            gap_defaulted: false,
        });
    }

    let choice = match cfg.engine {
        EngineChoice::Auto => {
            if classification.exact_polynomial {
                EngineChoice::Hierarchical
            } else if n <= cfg.subset_cap {
                EngineChoice::BruteSubsets
            } else {
                EngineChoice::Sample
            }
        }
        EngineChoice::ClosedForm => {
            return Err(Error::Input(
                "closed-form engine applies to inconsistency measures, not queries".into(),
            ))
        }
        other => other,
    };

    let mut gap_defaulted = false;
    let entries: Vec<(FactId, Valuation)> = match choice {
        EngineChoice::Hierarchical => {
            if !classification.exact_polynomial {
                return Err(Error::Precondition(
                    "hierarchical engine needs self-join-free hierarchical \
                     relation-disjoint disjuncts"
                        .into(),
                ));
            }
            let circuit = factorize_read_once(q, db)?;
            selected
                .iter()
                .map(|&f| Ok((f, Valuation::Exact(shapley_from_circuit(&circuit, db, f)?))))
                .collect::<Result<_>>()?
        }
        EngineChoice::BrutePermutations | EngineChoice::BruteSubsets => {
            let vector = if choice == EngineChoice::BrutePermutations {
                shapley_exact_permutations(&game, cfg.permutation_cap)?
            } else {
                shapley_exact_subsets(&game, cfg.subset_cap)?
            };
            selected
                .iter()
                .map(|&f| {
                    let v = vector
                        .value_of(f)
                        .cloned()
                        .ok_or_else(|| Error::Internal(format!("missing value for fact {f}")))?;
                    Ok((f, Valuation::Exact(v)))
                })
                .collect::<Result<_>>()?
        }
        EngineChoice::Sample => {
            // monotone 0/1 game: marginals live in [0, 1]
            let range = 1.0;
            match cfg.approx {
                ApproxMode::Additive => selected
                    .iter()
                    .map(|&f| {
                        let e =
                            estimate_additive(&game, f, cfg.epsilon, cfg.delta, range, cfg.seed)?;
                        Ok((f, Valuation::Estimate(e)))
                    })
                    .collect::<Result<_>>()?,
                ApproxMode::Multiplicative => {
                    let gap = cfg.gap.unwrap_or_else(|| {
                        gap_defaulted = true;
                        default_gap(n)
                    });
                    if !(gap > 0.0) {
                        return Err(Error::Input(format!("gap must be positive, got {gap}")));
                    }
                    let mut out = Vec::with_capacity(selected.len());
                    for &f in &selected {
                        if null_player(q, db, f)? {
                            out.push((f, Valuation::Exact(BigRational::zero())));
                        } else {
                            let e = estimate_multiplicative(
                                &game,
                                f,
                                cfg.epsilon,
                                cfg.delta,
                                gap,
                                range,
                                cfg.seed,
                            )?;
                            out.push((f, Valuation::Estimate(e)));
                        }
                    }
                    out
                }
            }
        }
        EngineChoice::Auto | EngineChoice::ClosedForm => unreachable!(),
    };

    let engine = match choice {
        EngineChoice::Hierarchical => EngineKind::HierarchicalDp,
        EngineChoice::BrutePermutations => EngineKind::ExactPermutations,
        EngineChoice::BruteSubsets => EngineKind::ExactSubsets,
        EngineChoice::Sample => match cfg.approx {
            ApproxMode::Additive => EngineKind::SampleAdditive,
            ApproxMode::Multiplicative => EngineKind::SampleMultiplicative,
        },
        _ => unreachable!(),
    };
    Ok(ShapqRun {
        classification,
        engine,
        entries,
        wealth,
        exo_satisfied: false,
        gap_defaulted,
    })
}
