use std::path::PathBuf;
use std::process::ExitCode;

use certgd::certify::TheoremId;
use certgd_harness::registry::{compatible_theorems, MethodId, ProblemId, SetId};
use certgd_harness::suite::{read_suite, run_suite};
use certgd_harness::{exit, resolve, run_plan, write_trace, Format, HarnessError, RunConfig, StartPoint};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "certgd", version, about = "Run first-order methods and certify their potential-function proofs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one method on one problem and write its trace.
    Run {
        #[arg(long)]
        problem: String,
        #[arg(long)]
        method: String,
        #[arg(long)]
        set: Option<String>,
        #[arg(long)]
        schedule: Option<String>,
        #[arg(long)]
        steps: usize,
        /// Check the per-step and end-to-end certificates.
        #[arg(long)]
        certify: bool,
        /// Comma-separated theorem ids; defaults to every compatible one.
        #[arg(long, value_delimiter = ',')]
        theorems: Vec<String>,
        /// Comma-separated starting point; defaults to the set's start.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x0: Option<Vec<f64>>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a JSON list of run configs in parallel.
    Suite {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the registered problems, sets, methods and theorems.
    List,
}

fn fail(e: &HarnessError) -> ExitCode {
    eprintln!("certgd: {e}");
    ExitCode::from(if e.is_config() { exit::CONFIG } else { exit::FAILURE })
}

fn verdict(pass: bool) -> ExitCode {
    ExitCode::from(if pass { exit::OK } else { exit::FAILURE })
}

fn list() {
    println!("problems:");
    for p in ProblemId::ALL {
        println!("  {:<12} {}", p.id(), p.describe());
    }
    println!("sets:");
    for s in SetId::ALL {
        println!("  {:<14} {}", s.id(), s.describe());
    }
    println!("methods (schedules; theorems):");
    for m in MethodId::ALL {
        for s in m.schedules() {
            let th: Vec<&str> = compatible_theorems(m, s).iter().map(|t| t.id()).collect();
            println!("  {:<18} {:<17} {}", m.id(), s, th.join(", "));
        }
    }
    println!("theorems:");
    for t in TheoremId::ALL {
        println!("  {}", t.id());
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            problem,
            method,
            set,
            schedule,
            steps,
            certify,
            theorems,
            x0,
            out,
            format,
            seed,
        } => {
            let config = RunConfig {
                problem,
                method,
                schedule,
                set,
                steps,
                x0: x0.map_or_else(StartPoint::default, StartPoint::Point),
                certify,
                theorems,
                out,
                format,
                seed,
            };
            let plan = match resolve(&config) {
                Ok(p) => p,
                Err(e) => return fail(&e),
            };
            let outcome = match run_plan(&plan) {
                Ok(o) => o,
                Err(e) => return fail(&e),
            };
            if let Err(e) = write_trace(&outcome.doc, &config.out, config.format) {
                return fail(&e);
            }
            for c in &outcome.doc.meta.certificates {
                let fmt = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.6e}"));
                println!(
                    "{:<16} {} lhs {} rhs {} at t={}{}",
                    c.theorem,
                    if c.pass { "PASS" } else { "FAIL" },
                    fmt(c.lhs),
                    fmt(c.rhs),
                    c.at,
                    c.not_certifiable.as_ref().map_or(String::new(), |w| format!(" (not certifiable: {w})"))
                );
            }
            verdict(outcome.pass())
        }
        Command::Suite { config } => {
            let entries = match read_suite(&config).and_then(|c| run_suite(&c)) {
                Ok(e) => e,
                Err(e) => return fail(&e),
            };
            let mut all = true;
            for e in &entries {
                match &e.result {
                    Ok(pass) => {
                        all &= *pass;
                        println!("{} {}", if *pass { "PASS" } else { "FAIL" }, e.out.display());
                    }
                    Err(err) => {
                        all = false;
                        println!("ERROR {}: {err}", e.out.display());
                    }
                }
            }
            verdict(all)
        }
        Command::List => {
            list();
            ExitCode::from(exit::OK)
        }
    }
}
