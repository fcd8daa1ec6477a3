//! Work budgets for the exponential-core solvers.
//!
//! The vertex-cover and maximal-independent-set routines are exact but
//! worst-case exponential. Every unit of search work (a branch node, an
//! enumerated set) is charged against a shared [`Budget`]; when it runs out
//! the computation aborts with [`Error::BudgetExceeded`] instead of
//! returning an approximate answer.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

/// Name of the environment variable the CLI reads to override the default
/// work budget.
pub const BUDGET_ENV_VAR: &str = "SHAPDB_BUDGET";

/// Default number of work units per run.
pub const DEFAULT_BUDGET: u64 = 50_000_000;

/// A decrementing work counter shared by all solvers of one run.
#[derive(Debug)]
pub struct Budget {
    remaining: AtomicU64,
}

impl Budget {
    pub fn new(units: u64) -> Self {
        Budget {
            remaining: AtomicU64::new(units),
        }
    }

    /// Reads `SHAPDB_BUDGET` if set, otherwise uses the default.
    pub fn from_env() -> Result<Self> {
        match std::env::var(BUDGET_ENV_VAR) {
            Ok(s) => {
                let units: u64 = s.trim().parse().map_err(|_| {
                    Error::Input(format!(
                        "{BUDGET_ENV_VAR} must be an unsigned integer, got {s:?}"
                    ))
                })?;
                Ok(Budget::new(units))
            }
            Err(_) => Ok(Budget::new(DEFAULT_BUDGET)),
        }
    }

    /// Charges `units` of work; fails once the budget is exhausted.
    pub fn spend(&self, units: u64, what: &'static str) -> Result<()> {
        let mut cur = self.remaining.load(Ordering::Relaxed);
        loop {
            if cur < units {
                return Err(Error::BudgetExceeded(what));
            }
            match self.remaining.compare_exchange_weak(
                cur,
                cur - units,
                Ordering::Relaxed,
                Ordering::Relaxed,
            ) {
                Ok(_) => return Ok(()),
                Err(actual) => cur = actual,
            }
        }
    }

    pub fn remaining(&self) -> u64 {
        self.remaining.load(Ordering::Relaxed)
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(DEFAULT_BUDGET)
    }
}
