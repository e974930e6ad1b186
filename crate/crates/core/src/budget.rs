//! Resource limits shared by the search procedures. Exhausting a limit is
//! reported as [`Error::Budget`], never as a negative answer.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::regression::DEFAULT_NODE_BUDGET;

#[derive(Clone, Debug)]
pub struct Budget {
    /// Estimated node count for fully expanded regressions.
    pub nodes: usize,
    /// Clauses per propositional encoding in bounded model search.
    pub clauses: usize,
    /// Interpretations or candidates visited by a search.
    pub states: usize,
    /// Wall-clock limit for the whole call.
    pub deadline: Option<Instant>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            nodes: DEFAULT_NODE_BUDGET,
            clauses: 20_000_000,
            states: 1_000_000,
            deadline: None,
        }
    }
}

impl Budget {
    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.deadline = Some(Instant::now() + limit);
        self
    }

    pub fn check_time(&self) -> Result<()> {
        match self.deadline {
            Some(d) if Instant::now() > d => Err(Error::Budget("wall-clock limit reached".into())),
            _ => Ok(()),
        }
    }
}
