//! Shapley-value attribution for relational databases.
//!
//! Two attribution settings share one game-theoretic kernel:
//!
//! - **Query answering** — how much does an endogenous fact contribute to
//!   a Boolean query being true? Exact polynomial computation through
//!   read-once lineage for hierarchical self-join-free queries, generic
//!   exact engines at small scale, Monte-Carlo estimation beyond.
//! - **Inconsistency** — how much does a fact contribute to the violation
//!   of a set of functional dependencies, under five measures (drastic,
//!   MI, P, R, MC)? Closed forms where they exist, budgeted exact engines
//!   and estimators elsewhere.
//!
//! Alongside the engines, classifiers report where each instance falls in
//! the published tractability dichotomies, with citations.
//!
//! Start with the `examples/` directory — one runnable example per
//! capability — or with [`cli`] for the `shapdb` command-line front end.

pub mod budget;
pub mod cli;
pub mod error;
pub mod relational;
pub mod report;
pub mod shapi;
pub mod shapley;
pub mod shapq;

pub use budget::Budget;
pub use error::{Error, Result};
