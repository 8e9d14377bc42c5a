//! Argument parsing and command dispatch.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use mogdm::checks;
use mogdm::front::Solver;
use mogdm::problems;

use crate::config::ExperimentConfig;
use crate::profile::{self, Metric};
use crate::run;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "mogdm",
    version,
    about = "Multiobjective global descent benchmarks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct RunOverrides {
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Number of starts per problem.
    #[arg(long)]
    pub starts: Option<usize>,
    /// Solver to run; repeat for several.
    #[arg(long = "solver", value_parser = parse_solver)]
    pub solvers: Vec<Solver>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every configured solver on every configured problem.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Problem to run (repeatable; "all" for the registry).
        #[arg(long = "problem")]
        problems: Vec<String>,
        /// Fill the wall_time column.
        #[arg(long)]
        timing: bool,
        #[command(flatten)]
        common: RunOverrides,
    },
    /// One problem, with PF/PFG scatter data.
    Front {
        problem: String,
        #[command(flatten)]
        common: RunOverrides,
    },
    /// Performance profiles from summary CSVs.
    Profile {
        #[arg(required = true)]
        summaries: Vec<PathBuf>,
        /// hv, delta or fevals.
        #[arg(long, default_value = "hv")]
        metric: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Registered problems.
    ListProblems {
        #[arg(long)]
        json: bool,
    },
    /// Run the invariant suites.
    Check {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn parse_solver(s: &str) -> Result<Solver, String> {
    s.parse().map_err(|e: mogdm::Error| e.to_string())
}

enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

fn usage<T>(r: anyhow::Result<T>) -> Result<T, Failure> {
    r.map_err(Failure::Usage)
}

fn runtime<T>(r: anyhow::Result<T>) -> Result<T, Failure> {
    r.map_err(Failure::Runtime)
}

fn apply(cfg: &mut ExperimentConfig, common: &RunOverrides) {
    if let Some(out) = &common.out {
        cfg.out = out.clone();
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(starts) = common.starts {
        cfg.starts = starts;
    }
    if !common.solvers.is_empty() {
        cfg.solvers = common.solvers.clone();
    }
}

fn execute(cfg: &ExperimentConfig, jobs: Option<usize>, scatter: bool) -> Result<i32, Failure> {
    let specs = usage(cfg.validate())?;
    let outcomes = runtime(run::run_experiment(cfg, &specs, jobs))?;
    runtime(run::write_outputs(cfg, &outcomes, &cfg.out))?;
    if scatter {
        for o in &outcomes {
            runtime(run::write_front_scatter(o, &cfg.out.join("plot")))?;
        }
    }
    let failed: Vec<&str> = outcomes
        .iter()
        .filter(|o| o.failed())
        .map(|o| o.problem.name.as_str())
        .collect();
    if failed.is_empty() {
        Ok(EXIT_OK)
    } else {
        warn!("failed problems: {}", failed.join(", "));
        Ok(EXIT_RUNTIME)
    }
}

fn dispatch(cli: Cli) -> Result<i32, Failure> {
    match cli.command {
        Command::Run {
            config,
            problems,
            timing,
            common,
        } => {
            let mut cfg = match &config {
                Some(path) => usage(ExperimentConfig::load(path))?,
                None => ExperimentConfig::for_problems(Vec::new()),
            };
            if !problems.is_empty() {
                cfg.problems = problems;
            }
            cfg.timing |= timing;
            apply(&mut cfg, &common);
            execute(&cfg, common.jobs, false)
        }
        Command::Front { problem, common } => {
            let mut cfg = ExperimentConfig::for_problems(vec![problem]);
            cfg.solvers = vec![Solver::Mogdm];
            apply(&mut cfg, &common);
            execute(&cfg, common.jobs, true)
        }
        Command::Profile {
            summaries,
            metric,
            out,
        } => {
            let metric: Metric = usage(metric.parse())?;
            let curves = usage(profile::profile_files(&summaries, metric))?;
            runtime(crate::output::ensure_dir(&out))?;
            let stem = format!("profile_{}", metric.label());
            runtime(profile::write_profile_csv(
                &out.join(format!("{stem}.csv")),
                &curves,
            ))?;
            runtime(profile::write_profile_dat(
                &out.join(format!("{stem}.dat")),
                &curves,
                metric,
            ))?;
            for c in &curves {
                info!(
                    "{}: rho(1) = {}, rho(tau_max) = {}",
                    c.solver,
                    c.at(1.0),
                    c.values.last().copied().unwrap_or(0.0)
                );
            }
            Ok(EXIT_OK)
        }
        Command::ListProblems { json } => {
            let infos: Vec<_> = problems::registry().iter().map(|s| s.info()).collect();
            if json {
                println!(
                    "{}",
                    runtime(serde_json::to_string_pretty(&infos).map_err(Into::into))?
                );
            } else {
                println!(
                    "{:<10} {:>2} {:>3}  {:<10} {:<12} front",
                    "name", "m", "n", "multimodal", "family"
                );
                for i in infos {
                    println!(
                        "{:<10} {:>2} {:>3}  {:<10} {:<12} {}",
                        i.name,
                        i.m,
                        i.n,
                        if i.multimodal { "yes" } else { "no" },
                        i.family,
                        if i.known_front { "analytic" } else { "-" }
                    );
                }
            }
            Ok(EXIT_OK)
        }
        Command::Check { seed } => {
            let outcomes = runtime(checks::run_all(seed).map_err(Into::into))?;
            let mut ok = true;
            for c in &outcomes {
                ok &= c.passed();
                println!(
                    "{} {:<28} samples {:>7}  violations {:>3}  worst {:.3e}{}",
                    if c.passed() { "PASS" } else { "FAIL" },
                    c.name,
                    c.samples,
                    c.violations,
                    c.worst,
                    c.example
                        .as_ref()
                        .map(|e| format!("  ({e})"))
                        .unwrap_or_default()
                );
            }
            Ok(if ok { EXIT_OK } else { EXIT_RUNTIME })
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            EXIT_RUNTIME
        }
    }
}
