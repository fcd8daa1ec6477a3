//! Attribution of facts to database inconsistency.
//!
//! Five measures quantify how strongly a database violates a set of
//! functional dependencies; the Shapley value of the game whose utility is
//! the measure of the coalition distributes that quantity over the facts.
//! All facts are players here — there is no exogenous part.
//!
//! For FDs every minimal inconsistent subset is a pair, so every measure
//! is a function of the conflict graph: drastic is the existence of an
//! edge, MI counts edges, P counts non-isolated vertices, R is the minimum
//! vertex cover, MC counts maximal independent sets (with the convention
//! that the empty database measures 0).

mod repairs;
mod tractability;

pub use tractability::{
    lhs_chain_classify, tractability_report, ExactComplexity, FdNormalization, FprasStatus,
    LhsChainStatus, TractabilityReport,
};

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::relational::{conflict_graph, validate_fds, ConflictGraph, Database, FactId, Fd};
use crate::shapley::{
    estimate_additive, estimate_multiplicative, shapley_exact_permutations, shapley_exact_subsets,
    Coalition, CoalitionGame, EngineKind, PlayerId, Valuation,
};
use crate::shapq::{ApproxMode, DispatchConfig, EngineChoice};
use repairs::{count_maximal_independent_sets, min_vertex_cover, BitGraph};

/// The five inconsistency measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Measure {
    /// 1 if inconsistent, else 0
    Drastic,
    /// number of minimal inconsistent subsets (conflicting pairs)
    MinimalInconsistent,
    /// number of problematic facts (members of some conflicting pair)
    Problematic,
    /// cardinality-repair cost: fewest deletions restoring consistency
    Repair,
    /// number of maximal consistent subsets (subset repairs)
    MaximalConsistent,
}

impl Measure {
    pub const ALL: [Measure; 5] = [
        Measure::Drastic,
        Measure::MinimalInconsistent,
        Measure::Problematic,
        Measure::Repair,
        Measure::MaximalConsistent,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Measure::Drastic => "drastic",
            Measure::MinimalInconsistent => "MI",
            Measure::Problematic => "P",
            Measure::Repair => "R",
            Measure::MaximalConsistent => "MC",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "drastic" | "d" => Ok(Measure::Drastic),
            "MI" | "mi" => Ok(Measure::MinimalInconsistent),
            "P" | "p" => Ok(Measure::Problematic),
            "R" | "r" => Ok(Measure::Repair),
            "MC" | "mc" => Ok(Measure::MaximalConsistent),
            other => Err(Error::Input(format!(
                "unknown measure {other:?} (expected drastic, MI, P, R or MC)"
            ))),
        }
    }
}

/// Evaluates a measure on the subgraph induced by a coalition of fact ids.
fn measure_on(
    graph: &ConflictGraph,
    coalition: &Coalition,
    measure: Measure,
    budget: &Budget,
) -> Result<u64> {
    let inside_edges: Vec<(FactId, FactId)> = graph
        .edges()
        .filter(|&(u, v)| coalition.contains(u as usize) && coalition.contains(v as usize))
        .collect();
    match measure {
        Measure::Drastic => Ok(u64::from(!inside_edges.is_empty())),
        Measure::MinimalInconsistent => Ok(inside_edges.len() as u64),
        Measure::Problematic => {
            let involved: BTreeSet<FactId> =
                inside_edges.iter().flat_map(|&(u, v)| [u, v]).collect();
            Ok(involved.len() as u64)
        }
        Measure::Repair | Measure::MaximalConsistent => {
            if measure == Measure::MaximalConsistent && coalition.is_empty() {
                // the empty database measures 0 by convention
                return Ok(0);
            }
            // isolated facts are in every repair and never deleted; only
            // the conflicting part needs search
            let involved: Vec<FactId> = inside_edges
                .iter()
                .flat_map(|&(u, v)| [u, v])
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            let index_of = |f: FactId| involved.binary_search(&f).unwrap();
            let mut g = BitGraph::new(involved.len())?;
            for &(u, v) in &inside_edges {
                g.add_edge(index_of(u), index_of(v));
            }
            let active: u128 = if involved.is_empty() {
                0
            } else if involved.len() == 128 {
                u128::MAX
            } else {
                (1u128 << involved.len()) - 1
            };
            match measure {
                Measure::Repair => min_vertex_cover(&g, active, budget),
                Measure::MaximalConsistent => count_maximal_independent_sets(&g, active, budget),
                _ => unreachable!(),
            }
        }
    }
}

/// The value I(D, Δ) of one measure on the whole database.
pub fn inconsistency_measure(
    db: &Database,
    fds: &[Fd],
    measure: Measure,
    budget: &Budget,
) -> Result<BigRational> {
    validate_fds(db, fds)?;
    let graph = conflict_graph(db, fds);
    let all = Coalition::from_indices(db.len(), &(0..db.len()).collect::<Vec<_>>());
    Ok(BigRational::from_integer(
        measure_on(&graph, &all, measure, budget)?.into(),
    ))
}

/// I_R(D, Δ): the fewest deletions that restore consistency. For FDs this
/// is a minimum vertex cover of the conflict graph, computed exactly by
/// budgeted branch-and-bound.
pub fn cardinality_repair_cost(db: &Database, fds: &[Fd], budget: &Budget) -> Result<u64> {
    let v = inconsistency_measure(db, fds, Measure::Repair, budget)?;
    Ok(v.to_integer().try_into().expect("repair cost fits u64"))
}

/// I_MC(D, Δ): the number of maximal consistent subsets (subset repairs),
/// counted exactly by budgeted enumeration over the conflicting part of
/// the graph. The empty database counts 0 by convention.
pub fn count_maximal_consistent(db: &Database, fds: &[Fd], budget: &Budget) -> Result<u64> {
    let v = inconsistency_measure(db, fds, Measure::MaximalConsistent, budget)?;
    Ok(v.to_integer().try_into().expect("repair count fits u64"))
}

/// The coalition game of one inconsistency measure: players are all facts,
/// utility(E) = I(E, Δ).
pub struct InconsistencyGame<'a> {
    graph: ConflictGraph,
    measure: Measure,
    budget: &'a Budget,
    players: Vec<PlayerId>,
}

/// Builds the inconsistency game for `measure` over `db` and `fds`.
pub fn shapi_game<'a>(
    db: &Database,
    fds: &[Fd],
    measure: Measure,
    budget: &'a Budget,
) -> Result<InconsistencyGame<'a>> {
    validate_fds(db, fds)?;
    Ok(InconsistencyGame {
        graph: conflict_graph(db, fds),
        measure,
        budget,
        players: (0..db.len() as PlayerId).collect(),
    })
}

impl InconsistencyGame<'_> {
    pub fn graph(&self) -> &ConflictGraph {
        &self.graph
    }
}

impl CoalitionGame for InconsistencyGame<'_> {
    fn players(&self) -> &[PlayerId] {
        &self.players
    }

    fn utility(&self, coalition: &Coalition) -> Result<BigRational> {
        // player position == fact id: players are all facts in id order
        Ok(BigRational::from_integer(
            measure_on(&self.graph, coalition, self.measure, self.budget)?.into(),
        ))
    }
}

/// Closed-form Shapley values for the two measures whose marginals depend
/// only on conflict degrees. With d(g) the degree of g in the conflict
/// graph and N(f) the neighbors of f:
///
///   MI:  d(f) / 2
///   P:   d(f)/(d(f)+1)  +  Σ_{g ∈ N(f)}  1 / (d(g)·(d(g)+1))
///
/// The MI marginal of f is the number of already-arrived conflict
/// partners; each neighbor precedes f with probability 1/2. The P marginal
/// counts f itself once any partner arrived first, plus each neighbor g
/// that f makes problematic, which requires g to arrive before f and
/// every other neighbor of g after f.
pub fn shapi_closed_form(
    db: &Database,
    fds: &[Fd],
    measure: Measure,
    f: FactId,
) -> Result<BigRational> {
    validate_fds(db, fds)?;
    if db.fact(f).is_none() {
        return Err(Error::Input(format!("no fact with id {f}")));
    }
    let graph = conflict_graph(db, fds);
    closed_form_from_graph(&graph, measure, f)
}

pub(crate) fn closed_form_from_graph(
    graph: &ConflictGraph,
    measure: Measure,
    f: FactId,
) -> Result<BigRational> {
    let rat = |n: u64, d: u64| BigRational::new(BigInt::from(n), BigInt::from(d));
    match measure {
        Measure::MinimalInconsistent => Ok(rat(graph.degree(f) as u64, 2)),
        Measure::Problematic => {
            let d = graph.degree(f) as u64;
            let mut v = rat(d, d + 1);
            for g in graph.neighbors(f) {
                let dg = graph.degree(g) as u64;
                v += rat(1, dg * (dg + 1));
            }
            Ok(v)
        }
        other => Err(Error::Precondition(format!(
            "no closed form for measure {other}; use an exact engine or sampling"
        ))),
    }
}

/// Result of an inconsistency-attribution dispatch.
#[derive(Debug, Clone)]
pub struct ShapiRun {
    pub measure: Measure,
    pub engine: EngineKind,
    pub entries: Vec<(FactId, Valuation)>,
    /// I(D, Δ): the quantity exact values sum to
    pub wealth: BigRational,
    pub tractability: TractabilityReport,
    pub gap_defaulted: bool,
}

fn default_gap(n: usize) -> f64 {
    if n >= 2 {
        1.0 / (n as f64 * (n - 1) as f64)
    } else {
        1.0
    }
}

/// Computes inconsistency-attribution values for the selected facts (all
/// when `selection` is None).
///
/// `engine = Auto` uses the closed forms for MI and P, the exact subset
/// engine for the other measures while the database fits its cap, and
/// additive sampling beyond that (each sampled utility is computed exactly
/// under the work budget). Multiplicative sampling is available for the
/// measures with a known gap — drastic and R, gap 1/(|D|·(|D|−1)) — after
/// certifying zeros (a fact in no conflict is a null player). It is
/// refused for MC: whether the subset-repair count admits a multiplicative
/// FPRAS without an lhs chain is open (Livshits & Kimelfeld, LMCS 2022),
/// and for {A→B, C→D} it has none unless NP = RP (Calautti, Livshits,
/// Pieris & Schleich, PODS 2022).
pub fn shapi_dispatch(
    db: &Database,
    fds: &[Fd],
    measure: Measure,
    selection: Option<&[FactId]>,
    cfg: &DispatchConfig,
    budget: &Budget,
) -> Result<ShapiRun> {
    let game = shapi_game(db, fds, measure, budget)?;
    let n = db.len();
    let selected: Vec<FactId> = match selection {
        Some(ids) => {
            let mut ids = ids.to_vec();
            ids.sort_unstable();
            ids.dedup();
            for &f in &ids {
                if db.fact(f).is_none() {
                    return Err(Error::Input(format!("no fact with id {f}")));
                }
            }
            ids
        }
        None => game.players().to_vec(),
    };
    let wealth = inconsistency_measure(db, fds, measure, budget)?;
    let tractability = tractability_report(fds, measure);

    let closed_form_applies =
        matches!(measure, Measure::MinimalInconsistent | Measure::Problematic);
    let choice = match cfg.engine {
        EngineChoice::Auto => {
            if closed_form_applies {
                EngineChoice::ClosedForm
            } else if n <= cfg.subset_cap {
                EngineChoice::BruteSubsets
            } else {
                EngineChoice::Sample
            }
        }
        EngineChoice::Hierarchical => {
            return Err(Error::Input(
                "the hierarchical engine applies to queries, not inconsistency measures".into(),
            ))
        }
        EngineChoice::ClosedForm if !closed_form_applies => {
            return Err(Error::Input(format!(
                "no closed form for measure {measure}; available for MI and P"
            )))
        }
        other => other,
    };

    let mut gap_defaulted = false;
    let entries: Vec<(FactId, Valuation)> = match choice {
        EngineChoice::ClosedForm => selected
            .iter()
            .map(|&f| {
                Ok((
                    f,
                    Valuation::Exact(closed_form_from_graph(game.graph(), measure, f)?),
                ))
            })
            .collect::<Result<_>>()?,
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
            sample_entries(&game, measure, &selected, cfg, &wealth, &mut gap_defaulted)?
        }
        EngineChoice::Auto | EngineChoice::Hierarchical => unreachable!(),
    };

    let engine = match choice {
        EngineChoice::ClosedForm => EngineKind::ClosedForm,
        EngineChoice::BrutePermutations => EngineKind::ExactPermutations,
        EngineChoice::BruteSubsets => EngineKind::ExactSubsets,
        EngineChoice::Sample => match cfg.approx {
            ApproxMode::Additive => EngineKind::SampleAdditive,
            ApproxMode::Multiplicative => EngineKind::SampleMultiplicative,
        },
        _ => unreachable!(),
    };
    Ok(ShapiRun {
        measure,
        engine,
        entries,
        wealth,
        tractability,
        gap_defaulted,
    })
}

/// Marginal range per measure: 1 for the 0/1 drastic measure and for R
/// (adding a fact raises the repair cost by at most one); degree-based for
/// MI and P; the total measure for the monotone MC count.
fn sample_entries(
    game: &InconsistencyGame<'_>,
    measure: Measure,
    selected: &[FactId],
    cfg: &DispatchConfig,
    wealth: &BigRational,
    gap_defaulted: &mut bool,
) -> Result<Vec<(FactId, Valuation)>> {
    let n = game.players().len();
    let mut out = Vec::with_capacity(selected.len());
    match cfg.approx {
        ApproxMode::Additive => {
            for &f in selected {
                let deg = game.graph().degree(f) as f64;
                let range = match measure {
                    Measure::Drastic | Measure::Repair => 1.0,
                    Measure::MinimalInconsistent => deg,
                    Measure::Problematic => 1.0 + deg,
                    Measure::MaximalConsistent => wealth
                        .to_f64()
                        .ok_or_else(|| Error::Internal("measure does not fit in f64".into()))?,
                };
                if deg == 0.0 {
                    // a fact in no conflict never changes any measure
                    out.push((f, Valuation::Exact(BigRational::zero())));
                } else {
                    let e = estimate_additive(game, f, cfg.epsilon, cfg.delta, range, cfg.seed)?;
                    out.push((f, Valuation::Estimate(e)));
                }
            }
        }
        ApproxMode::Multiplicative => {
            if measure == Measure::MaximalConsistent {
                return Err(Error::Input(
                    "multiplicative estimation for MC is refused: the existence of a \
                     multiplicative FPRAS without an lhs chain is open (Livshits & \
                     Kimelfeld, LMCS 2022), and for {A->B, C->D} there is none unless \
                     NP = RP (Calautti, Livshits, Pieris & Schleich, PODS 2022)"
                        .into(),
                ));
            }
            let gap = cfg.gap.unwrap_or_else(|| {
                *gap_defaulted = true;
                default_gap(n)
            });
            if !(gap > 0.0) {
                return Err(Error::Input(format!("gap must be positive, got {gap}")));
            }
            for &f in selected {
                let deg = game.graph().degree(f) as f64;
                if deg == 0.0 {
                    out.push((f, Valuation::Exact(BigRational::zero())));
                    continue;
                }
                let range = match measure {
                    Measure::Drastic | Measure::Repair => 1.0,
                    Measure::MinimalInconsistent => deg,
                    Measure::Problematic => 1.0 + deg,
                    Measure::MaximalConsistent => unreachable!(),
                };
                let e =
                    estimate_multiplicative(game, f, cfg.epsilon, cfg.delta, gap, range, cfg.seed)?;
                out.push((f, Valuation::Estimate(e)));
            }
        }
    }
    Ok(out)
}
