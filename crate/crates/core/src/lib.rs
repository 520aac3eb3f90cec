//! Exact-rational scheduling on identical machines where every unit-length
//! window of a machine may intersect at most `B` jobs.
//!
//! The crate is `no_std` (it needs `alloc`). Everything that touches files,
//! clocks or the command line lives in the `sts` companion crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod baselines;
pub mod budget;
pub mod containers;
pub mod error;
pub mod lp;
pub mod milp;
pub mod model;
pub mod nice;
pub mod rational;
pub mod rounding;
pub mod schedule;
pub mod scheme;

pub use budget::{Budget, NodeLimit, Unlimited};
pub use error::{Result, StsError};
pub use model::{Eps, Instance, Job, JobClass};
pub use rational::Rational;
pub use schedule::{Schedule, ScheduledJob, Verdict};
