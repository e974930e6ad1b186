//! Finite satisfiability. [`sat_bounded`] searches for small models of
//! arbitrary knowledge bases and is complete only up to its domain bound;
//! [`sat_dllite`] decides the lightweight fragment exactly.

mod bounded;
mod dllite;

use std::fmt;

pub use bounded::sat_bounded;
pub use dllite::{
    complete_abox, propositional_selections, sat_dllite, sat_dllite_core, sat_dllite_with_budget, Assertion, Completion,
    Completions, Literal,
};

use crate::budget::Budget;
use crate::error::Result;
use crate::interp::Interpretation;
use crate::syntax::Formula;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatVerdict {
    /// A model, already checked against the input.
    Satisfiable(Interpretation),
    /// No finite model exists. Only the complete backend says this.
    Unsatisfiable,
    /// No model with at most this many elements.
    NoModelUpTo(usize),
}

impl SatVerdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatVerdict::Satisfiable(_))
    }

    pub fn witness(&self) -> Option<&Interpretation> {
        match self {
            SatVerdict::Satisfiable(w) => Some(w),
            _ => None,
        }
    }
}

impl fmt::Display for SatVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SatVerdict::Satisfiable(_) => f.write_str("satisfiable"),
            SatVerdict::Unsatisfiable => f.write_str("unsatisfiable"),
            SatVerdict::NoModelUpTo(n) => write!(f, "no model up to domain size {n}"),
        }
    }
}

/// Which satisfiability procedure to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Bounded { max_domain: usize, una: bool },
    DlLite,
}

impl Backend {
    /// Whether a negative answer from this backend is definitive.
    pub fn is_complete(&self) -> bool {
        matches!(self, Backend::DlLite)
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Bounded { max_domain, .. } => write!(f, "bounded (max domain {max_domain})"),
            Backend::DlLite => f.write_str("dllite"),
        }
    }
}

/// Runs the selected backend on `k`.
pub fn check_sat(k: &Formula, backend: Backend, budget: &Budget) -> Result<SatVerdict> {
    match backend {
        Backend::Bounded { max_domain, una } => sat_bounded(k, max_domain, una, budget),
        Backend::DlLite => sat_dllite_with_budget(k, budget),
    }
}
