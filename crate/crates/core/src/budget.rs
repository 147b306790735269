//! Node and wall-clock budgets for exhaustive searches.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

/// Limits on the work an exhaustive procedure may do before it reports an
/// inconclusive result.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_nodes: u64,
    pub time_limit: Option<Duration>,
}

impl SearchBudget {
    pub fn nodes(max_nodes: u64) -> Self {
        SearchBudget { max_nodes, time_limit: None }
    }

    pub fn unlimited() -> Self {
        SearchBudget { max_nodes: u64::MAX, time_limit: None }
    }

    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }

    pub fn meter(&self) -> Meter {
        Meter {
            max_nodes: self.max_nodes,
            deadline: self.time_limit.map(|d| Instant::now() + d),
            shared: Arc::new(AtomicU64::new(0)),
            local: 0,
        }
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget::nodes(1 << 32)
    }
}

/// Marker error: the budget ran out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Exhausted;

/// Running account against a [`SearchBudget`].
///
/// Forked meters share the global node count (which enforces the limit) but
/// keep their own local count, so per-shard work can be reported
/// deterministically regardless of scheduling.
#[derive(Debug)]
pub struct Meter {
    max_nodes: u64,
    deadline: Option<Instant>,
    shared: Arc<AtomicU64>,
    local: u64,
}

impl Meter {
    #[inline]
    pub fn tick(&mut self) -> Result<(), Exhausted> {
        self.local += 1;
        let used = self.shared.fetch_add(1, Ordering::Relaxed) + 1;
        if used > self.max_nodes {
            return Err(Exhausted);
        }
        if used.is_multiple_of(1024) {
            if let Some(deadline) = self.deadline {
                if Instant::now() >= deadline {
                    return Err(Exhausted);
                }
            }
        }
        Ok(())
    }

    /// Nodes charged through this meter.
    pub fn local(&self) -> u64 {
        self.local
    }

    pub fn fork(&self) -> Meter {
        Meter { max_nodes: self.max_nodes, deadline: self.deadline, shared: Arc::clone(&self.shared), local: 0 }
    }

    /// Adds the local count of a finished fork.
    pub fn absorb(&mut self, other: &Meter) {
        self.local += other.local;
    }
}
