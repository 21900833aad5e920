//! Runner, registry and file formats for `certgd`.
//!
//! A [`RunConfig`] names a problem, method, schedule and feasible set by
//! string id. [`resolve`] checks every id and pairing up front, so a run
//! that starts never fails on configuration. [`run_experiment`] executes the
//! method, certifies the requested theorems and returns a [`TraceDoc`] that
//! [`write_trace`] encodes as JSON or CSV.

pub mod config;
mod error;
pub mod emit;
pub mod registry;
pub mod run;
pub mod suite;

pub use config::{resolve, Format, Plan, RunConfig, StartPoint};
pub use emit::{read_trace, to_csv, to_json, write_trace, TraceDoc};
pub use error::{HarnessError, Result};
pub use run::{run_experiment, run_plan, Outcome};

/// Process exit statuses.
pub mod exit {
    /// Every requested certificate passed.
    pub const OK: u8 = 0;
    /// A certificate failed, a run aborted, or output could not be written.
    pub const FAILURE: u8 = 1;
    pub const CONFIG: u8 = 2;
}
