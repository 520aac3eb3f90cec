use std::time::{Duration, Instant};

use sts_core::Budget;

/// Wall-clock budget for the core's searches.
#[derive(Debug, Clone, Copy)]
pub struct Deadline {
    end: Option<Instant>,
}

impl Deadline {
    pub fn after(limit: Duration) -> Self {
        Deadline { end: Some(Instant::now() + limit) }
    }

    pub fn never() -> Self {
        Deadline { end: None }
    }

    pub fn from_secs(secs: Option<f64>) -> Self {
        secs.map_or(Self::never(), |s| Self::after(Duration::from_secs_f64(s)))
    }
}

impl Budget for Deadline {
    fn exhausted(&self) -> bool {
        self.end.is_some_and(|e| Instant::now() >= e)
    }
}
