//! Multi-start front construction for the full method and the local-only
//! baseline.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::global::{local_options, mogdm_run, AnchorRecord, DescentTally, RunOutcome};
use crate::init::{self, stage_rng, streams, InitPlan};
use crate::local::local_solve;
use crate::params::SolverParams;
use crate::pareto::ParetoArchive;
use crate::problem::{estimate_bounds, BoxProblem, Evaluator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Solver {
    #[serde(rename = "mogdm")]
    Mogdm,
    #[serde(rename = "local-only")]
    LocalOnly,
}

impl Solver {
    pub const ALL: [Solver; 2] = [Solver::Mogdm, Solver::LocalOnly];

    pub fn label(self) -> &'static str {
        match self {
            Solver::Mogdm => "mogdm",
            Solver::LocalOnly => "local-only",
        }
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mogdm" => Ok(Solver::Mogdm),
            "local-only" | "local" => Ok(Solver::LocalOnly),
            _ => Err(Error::NotFound(format!("solver '{s}'"))),
        }
    }
}

/// What happened from one start.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartRecord {
    pub start: Vec<f64>,
    /// Visited anchors; the first is the plain local solution.
    pub anchors: Vec<AnchorRecord>,
    pub local_iterations: usize,
    pub rounds: usize,
    pub descents: DescentTally,
    pub exhausted: bool,
    pub f_evals: u64,
    pub jac_evals: u64,
}

/// Everything recorded by one front construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub problem: String,
    pub solver: Solver,
    pub m: usize,
    pub n: usize,
    pub seed: u64,
    pub n_starts: usize,
    /// Objective-vector evaluations, start generation included.
    pub f_evals: u64,
    pub jac_evals: u64,
    pub init_f_evals: u64,
    pub init_jac_evals: u64,
    pub ideal: Vec<f64>,
    pub nadir: Vec<f64>,
    pub starts: Vec<StartRecord>,
    /// First local solution of every start.
    pub wpf: ParetoArchive,
    /// Final anchor of every start.
    pub wpfg: ParetoArchive,
    pub pf: ParetoArchive,
    pub pfg: ParetoArchive,
    pub local_iterations: usize,
    pub rounds: usize,
    pub reanchors: usize,
    pub descents: DescentTally,
    /// Seconds. Not serialized, so that reports of equal runs are identical.
    #[serde(skip)]
    pub wall_time: f64,
}

impl RunReport {
    /// The front this solver reports: `pfg` for the full method, `pf` for the
    /// baseline (the two coincide there).
    pub fn front(&self) -> &ParetoArchive {
        &self.pfg
    }
}

/// Payoff table and spread-filtered starts shared by both solvers.
pub fn build_plan(problem: &BoxProblem, params: &SolverParams) -> Result<InitPlan> {
    init::plan(problem, params)
}

/// Margin of the local-search utopia point below the payoff-table ideal,
/// relative to the ideal-nadir range.
pub const UTOPIA_MARGIN: f64 = 0.01;

/// Runs `solver` from every start of `plan`.
///
/// The local searches use the plan's utopia point unless `params.utopia` is
/// already set.
pub fn run_solver(
    problem: &BoxProblem,
    params: &SolverParams,
    plan: &InitPlan,
    solver: Solver,
) -> Result<RunReport> {
    params.validate()?;
    let mut params = params.clone();
    if params.utopia.is_none() {
        params.utopia = Some(plan.utopia(UTOPIA_MARGIN));
    }
    let params = &params;
    let clock = Instant::now();
    let bounds_seed = stage_rng(params.seed, streams::BOUNDS).gen::<u64>();
    let bounds = estimate_bounds(problem, params.bounds_samples, bounds_seed)?;
    let seeds: Vec<u64> = {
        let mut rng = stage_rng(params.seed, streams::RUNS);
        plan.starts.iter().map(|_| rng.gen()).collect()
    };
    let local_opts = local_options(params);
    let starts: Vec<StartRecord> = plan
        .starts
        .par_iter()
        .zip(&seeds)
        .map(|(z0, &seed)| {
            let ev = Evaluator::new(problem);
            let out = match solver {
                Solver::Mogdm => mogdm_run(&ev, params, bounds, z0, seed)?,
                Solver::LocalOnly => {
                    let sol = local_solve(&ev, z0, &local_opts)?;
                    RunOutcome {
                        anchors: vec![AnchorRecord {
                            x: sol.x,
                            fx: sol.fx,
                        }],
                        local_iterations: sol.iterations,
                        rounds: 0,
                        descents: DescentTally::default(),
                        exhausted: false,
                    }
                }
            };
            Ok(StartRecord {
                start: z0.clone(),
                anchors: out.anchors,
                local_iterations: out.local_iterations,
                rounds: out.rounds,
                descents: out.descents,
                exhausted: out.exhausted,
                f_evals: ev.f_evals(),
                jac_evals: ev.jac_evals(),
            })
        })
        .collect::<Result<_>>()?;

    let mut wpf = ParetoArchive::raw();
    let mut wpfg = ParetoArchive::raw();
    let mut descents = DescentTally::default();
    let (mut f_evals, mut jac_evals) = (plan.f_evals, plan.jac_evals);
    let (mut local_iterations, mut rounds, mut reanchors) = (0, 0, 0);
    for s in &starts {
        let first = &s.anchors[0];
        let last = s.anchors.last().expect("non-empty trajectory");
        wpf.insert(first.x.clone(), first.fx.clone());
        wpfg.insert(last.x.clone(), last.fx.clone());
        descents.add(&s.descents);
        f_evals += s.f_evals;
        jac_evals += s.jac_evals;
        local_iterations += s.local_iterations;
        rounds += s.rounds;
        reanchors += s.anchors.len() - 1;
    }
    let pf = wpf.filter();
    let pfg = wpfg.filter();
    Ok(RunReport {
        problem: problem.name().to_string(),
        solver,
        m: problem.m(),
        n: problem.n(),
        seed: params.seed,
        n_starts: plan.starts.len(),
        f_evals,
        jac_evals,
        init_f_evals: plan.f_evals,
        init_jac_evals: plan.jac_evals,
        ideal: plan.ideal.clone(),
        nadir: plan.nadir.clone(),
        starts,
        wpf,
        wpfg,
        pf,
        pfg,
        local_iterations,
        rounds,
        reanchors,
        descents,
        wall_time: clock.elapsed().as_secs_f64(),
    })
}

/// Full method from `params.n_starts` spread-filtered starts.
pub fn mogdm_front(problem: &BoxProblem, params: &SolverParams) -> Result<RunReport> {
    let plan = build_plan(problem, params)?;
    run_solver(problem, params, &plan, Solver::Mogdm)
}

/// Local search only from the same starts as [`mogdm_front`].
pub fn local_front(problem: &BoxProblem, params: &SolverParams) -> Result<RunReport> {
    let plan = build_plan(problem, params)?;
    run_solver(problem, params, &plan, Solver::LocalOnly)
}
