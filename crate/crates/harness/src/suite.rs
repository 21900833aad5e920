//! Independent runs in parallel, one thread per config.

use std::path::Path;

use crate::config::{check_suite, RunConfig};
use crate::emit::write_trace;
use crate::run::run_plan;
use crate::{HarnessError, Result};

/// The verdict of one suite entry.
#[derive(Debug)]
pub struct SuiteEntry {
    pub out: std::path::PathBuf,
    pub result: Result<bool>,
}

pub fn read_suite(path: &Path) -> Result<Vec<RunConfig>> {
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| HarnessError::config("config", format!("{}: {e}", path.display())))
}

/// Validates every config, then runs them concurrently. Each run writes its
/// own file; the `Ok` payload of an entry is its certification verdict.
pub fn run_suite(configs: &[RunConfig]) -> Result<Vec<SuiteEntry>> {
    let plans = check_suite(configs)?;
    Ok(std::thread::scope(|scope| {
        let handles: Vec<_> = plans
            .iter()
            .map(|plan| {
                scope.spawn(move || {
                    let outcome = run_plan(plan)?;
                    write_trace(&outcome.doc, &plan.config.out, plan.config.format)?;
                    Ok(outcome.pass())
                })
            })
            .collect();
        handles
            .into_iter()
            .zip(&plans)
            .map(|(h, plan)| SuiteEntry {
                out: plan.config.out.clone(),
                result: h.join().expect("run thread panicked"),
            })
            .collect()
    }))
}
