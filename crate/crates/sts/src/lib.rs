//! File formats, command line and benchmark harness around `sts-core`.

pub mod bench;
pub mod cli;
pub mod deadline;
pub mod gen;
pub mod io;

pub use deadline::Deadline;
