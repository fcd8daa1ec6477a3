//! The JSON report emitted by the CLI.
//!
//! Reports are deterministic: entries are ordered by fact id, maps are
//! avoided, exact rationals serialize as numerator/denominator strings
//! (never floats), and nothing time- or machine-dependent is included
//! unless explicitly requested (`--timing`). Fixed inputs, flags and seed
//! therefore produce byte-identical output.

use num_rational::BigRational;
use num_traits::Signed;
use serde::Serialize;

use crate::relational::Database;
use crate::shapi::{ShapiRun, TractabilityReport};
use crate::shapley::{Estimate, Guarantee, Valuation};
use crate::shapq::{QueryClassification, ShapqRun};

/// An exact rational as decimal strings, exact at any magnitude.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct RationalJson {
    pub num: String,
    pub den: String,
}

impl From<&BigRational> for RationalJson {
    fn from(r: &BigRational) -> Self {
        RationalJson {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
        }
    }
}

/// Guarantee metadata attached to a sampled value.
#[derive(Debug, Clone, Serialize)]
pub struct GuaranteeJson {
    pub mode: &'static str,
    pub epsilon: f64,
    pub delta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub range: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap_defaulted: Option<bool>,
    pub samples: u64,
    pub seed: u64,
}

/// One attribution value: exact or estimated.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ValueJson {
    Exact {
        num: String,
        den: String,
    },
    Estimate {
        value: f64,
        guarantee: GuaranteeJson,
    },
}

fn value_json(v: &Valuation, gap_defaulted: bool) -> ValueJson {
    match v {
        Valuation::Exact(r) => {
            let rj = RationalJson::from(r);
            ValueJson::Exact {
                num: rj.num,
                den: rj.den,
            }
        }
        Valuation::Estimate(Estimate {
            value,
            samples,
            seed,
            guarantee,
            ..
        }) => {
            let g = match *guarantee {
                Guarantee::Additive {
                    epsilon,
                    delta,
                    range,
                } => GuaranteeJson {
                    mode: "additive",
                    epsilon,
                    delta,
                    range: Some(range),
                    gap: None,
                    gap_defaulted: None,
                    samples: *samples,
                    seed: *seed,
                },
                Guarantee::Multiplicative {
                    epsilon,
                    delta,
                    gap,
                    ..
                } => GuaranteeJson {
                    mode: "multiplicative",
                    epsilon,
                    delta,
                    range: None,
                    gap: Some(gap),
                    gap_defaulted: Some(gap_defaulted),
                    samples: *samples,
                    seed: *seed,
                },
            };
            ValueJson::Estimate {
                value: *value,
                guarantee: g,
            }
        }
    }
}

/// Per-fact report entry.
#[derive(Debug, Clone, Serialize)]
pub struct EntryJson {
    pub fact_id: u64,
    pub fact: String,
    pub value: ValueJson,
}

/// The efficiency identity: exact values must sum to the game's wealth
/// (q(D) − q(D_x), respectively I(D, Δ)).
#[derive(Debug, Clone, Serialize)]
pub struct ChecksumJson {
    pub expected: RationalJson,
    /// present when every reported value is exact and all players were
    /// reported, in which case it must equal `expected`
    #[serde(skip_serializing_if = "Option::is_none")]
    pub actual: Option<RationalJson>,
    /// exact-match | estimate | partial
    pub status: &'static str,
}

/// Classification of the query side.
#[derive(Debug, Clone, Serialize)]
pub struct QueryClassJson {
    pub disjuncts: Vec<DisjunctClassJson>,
    pub relation_disjoint: bool,
    pub exact_polynomial: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hardness: Option<String>,
    pub citations: Vec<&'static str>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DisjunctClassJson {
    pub self_join_free: bool,
    pub hierarchical: bool,
}

impl QueryClassJson {
    pub fn from_classification(c: &QueryClassification) -> Self {
        QueryClassJson {
            disjuncts: c
                .disjuncts
                .iter()
                .map(|s| DisjunctClassJson {
                    self_join_free: s.self_join_free,
                    hierarchical: s.hierarchical,
                })
                .collect(),
            relation_disjoint: c.relation_disjoint,
            exact_polynomial: c.exact_polynomial,
            hardness: c.hardness.clone(),
            citations: vec![crate::shapq::QUERY_DICHOTOMY_CITATION],
        }
    }
}

/// Classification block: query side, FD side, or both.
#[derive(Debug, Clone, Serialize)]
pub struct ClassificationJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub query: Option<QueryClassJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fds: Option<TractabilityReport>,
}

/// The complete report document.
#[derive(Debug, Clone, Serialize)]
pub struct ReportDocument {
    pub tool: &'static str,
    pub mode: &'static str,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measure: Option<&'static str>,
    pub engine: Option<&'static str>,
    pub classification: ClassificationJson,
    pub entries: Vec<EntryJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checksum: Option<ChecksumJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

impl ReportDocument {
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serialization");
        out.push('\n');
        out
    }
}

fn fact_text(db: &Database, id: u64) -> String {
    db.fact(id)
        .map_or_else(|| format!("#{id}"), |f| f.to_string())
}

fn checksum(entries: &[(u64, Valuation)], wealth: &BigRational, complete: bool) -> ChecksumJson {
    let expected = RationalJson::from(wealth);
    if !complete {
        return ChecksumJson {
            expected,
            actual: None,
            status: "partial",
        };
    }
    let mut sum = BigRational::from_integer(0.into());
    for (_, v) in entries {
        match v {
            Valuation::Exact(r) => sum += r,
            Valuation::Estimate(_) => {
                return ChecksumJson {
                    expected,
                    actual: None,
                    status: "estimate",
                }
            }
        }
    }
    ChecksumJson {
        expected,
        actual: Some(RationalJson::from(&sum)),
        status: "exact-match",
    }
}

/// True when an exact, complete checksum fails the efficiency identity.
/// The CLI treats this as an internal-consistency failure.
pub fn checksum_violated(c: &ChecksumJson) -> bool {
    match &c.actual {
        Some(actual) => c.status == "exact-match" && *actual != c.expected,
        None => false,
    }
}

/// Assembles the report for a query-attribution run.
pub fn shapq_report(
    db: &Database,
    run: &ShapqRun,
    seed: u64,
    complete: bool,
    timing_ms: Option<u64>,
) -> ReportDocument {
    let entries = run
        .entries
        .iter()
        .map(|(f, v)| EntryJson {
            fact_id: *f,
            fact: fact_text(db, *f),
            value: value_json(v, run.gap_defaulted),
        })
        .collect();
    ReportDocument {
        tool: "shapdb",
        mode: "shapq",
        seed,
        measure: None,
        engine: Some(run.engine.as_str()),
        classification: ClassificationJson {
            query: Some(QueryClassJson::from_classification(&run.classification)),
            fds: None,
        },
        entries,
        checksum: Some(checksum(&run.entries, &run.wealth, complete)),
        timing_ms,
    }
}

/// Assembles the report for an inconsistency-attribution run.
pub fn shapi_report(
    db: &Database,
    run: &ShapiRun,
    seed: u64,
    complete: bool,
    timing_ms: Option<u64>,
) -> ReportDocument {
    let entries = run
        .entries
        .iter()
        .map(|(f, v)| EntryJson {
            fact_id: *f,
            fact: fact_text(db, *f),
            value: value_json(v, run.gap_defaulted),
        })
        .collect();
    ReportDocument {
        tool: "shapdb",
        mode: "shapi",
        seed,
        measure: Some(run.measure.as_str()),
        engine: Some(run.engine.as_str()),
        classification: ClassificationJson {
            query: None,
            fds: Some(run.tractability.clone()),
        },
        entries,
        checksum: Some(checksum(&run.entries, &run.wealth, complete)),
        timing_ms,
    }
}

/// Assembles a classification-only report.
pub fn classify_report(
    query: Option<QueryClassJson>,
    fds: Option<TractabilityReport>,
    timing_ms: Option<u64>,
) -> ReportDocument {
    ReportDocument {
        tool: "shapdb",
        mode: "classify",
        seed: 0,
        measure: fds.as_ref().map(|t| t.measure),
        engine: None,
        classification: ClassificationJson { query, fds },
        entries: Vec::new(),
        checksum: None,
        timing_ms,
    }
}

/// Efficiency assertion helper used by tests and the CLI tripwire: for
/// exact complete runs, values must sum to the wealth exactly.
pub fn exact_sum_matches(entries: &[(u64, Valuation)], wealth: &BigRational) -> bool {
    let mut sum = BigRational::from_integer(0.into());
    for (_, v) in entries {
        match v {
            Valuation::Exact(r) => sum += r,
            Valuation::Estimate(_) => return true,
        }
    }
    (sum - wealth).abs() == BigRational::from_integer(0.into())
}
