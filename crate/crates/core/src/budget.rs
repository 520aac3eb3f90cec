//! Work budgets for the exhaustive searches (oracle, branch-and-bound).
//!
//! The core has no clock, so wall-time limits are supplied by the caller
//! through this trait.

use core::cell::Cell;

pub trait Budget {
    /// Called once per unit of work; `true` stops the search.
    fn exhausted(&self) -> bool;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Unlimited;

impl Budget for Unlimited {
    fn exhausted(&self) -> bool {
        false
    }
}

/// Stops after a fixed number of calls.
#[derive(Debug)]
pub struct NodeLimit {
    limit: u64,
    used: Cell<u64>,
}

impl NodeLimit {
    pub fn new(limit: u64) -> Self {
        NodeLimit { limit, used: Cell::new(0) }
    }

    pub fn used(&self) -> u64 {
        self.used.get()
    }
}

impl Budget for NodeLimit {
    fn exhausted(&self) -> bool {
        let n = self.used.get() + 1;
        self.used.set(n);
        n > self.limit
    }
}

impl<B: Budget + ?Sized> Budget for &B {
    fn exhausted(&self) -> bool {
        (**self).exhausted()
    }
}
