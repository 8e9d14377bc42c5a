//! The `run` and `front` commands.

use std::path::Path;

use log::{error, info};
use mogdm::front::{build_plan, run_solver, RunReport, Solver};
use mogdm::metrics::{extremes, reference_point};
use mogdm::params::SolverParams;
use mogdm::problems::{self, ProblemInfo, ProblemSpec};
use mogdm::MetricReport;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::output::{self, slug, SummaryRow};

/// Analytic front points used for the spread endpoints.
pub const FRONT_SAMPLE: usize = 1000;

/// One `(problem, solver)` run.
#[derive(Debug, Clone, Serialize)]
pub struct Cell {
    pub solver: Solver,
    pub report: Option<RunReport>,
    pub metrics: Option<MetricReport>,
    pub error: Option<String>,
    /// Seconds; only with timing enabled.
    pub wall_time: Option<f64>,
}

/// Every solver on one problem, scored against a shared reference point.
#[derive(Debug, Clone, Serialize)]
pub struct ProblemOutcome {
    pub problem: ProblemInfo,
    pub params: Option<SolverParams>,
    pub reference: Option<Vec<f64>>,
    pub cells: Vec<Cell>,
}

impl ProblemOutcome {
    pub fn failed(&self) -> bool {
        self.cells.iter().any(|c| c.error.is_some())
    }

    pub fn cell(&self, solver: Solver) -> Option<&Cell> {
        self.cells.iter().find(|c| c.solver == solver)
    }

    pub fn summary_rows(&self) -> Vec<SummaryRow> {
        self.cells
            .iter()
            .map(|c| SummaryRow {
                problem: self.problem.name.clone(),
                m: self.problem.m,
                n: self.problem.n,
                solver: c.solver.label().to_string(),
                n_nondominated: c.metrics.as_ref().map(|r| r.n_nondominated),
                hypervolume: c.metrics.as_ref().map(|r| r.hypervolume),
                delta: c.metrics.as_ref().map(|r| r.delta_spread),
                f_evals: c.metrics.as_ref().map(|r| r.f_evals),
                wall_time: c.wall_time,
            })
            .collect()
    }
}

fn failed_cells(solvers: &[Solver], message: &str) -> Vec<Cell> {
    solvers
        .iter()
        .map(|&solver| Cell {
            solver,
            report: None,
            metrics: None,
            error: Some(message.to_string()),
            wall_time: None,
        })
        .collect()
}

/// Runs every configured solver on `spec` from one shared set of starts.
pub fn run_problem(cfg: &ExperimentConfig, spec: &ProblemSpec) -> ProblemOutcome {
    let problem = &spec.problem;
    let info = spec.info();
    let params = match cfg.params_for(spec) {
        Ok(p) => p,
        Err(e) => {
            return ProblemOutcome {
                problem: info,
                params: None,
                reference: None,
                cells: failed_cells(&cfg.solvers, &format!("{e:#}")),
            }
        }
    };
    let plan = match build_plan(problem, &params) {
        Ok(p) => p,
        Err(e) => {
            error!("{}: start generation failed: {e}", problem.name());
            return ProblemOutcome {
                problem: info,
                params: Some(params),
                reference: None,
                cells: failed_cells(&cfg.solvers, &e.to_string()),
            };
        }
    };
    let mut cells: Vec<Cell> = cfg
        .solvers
        .iter()
        .map(
            |&solver| match run_solver(problem, &params, &plan, solver) {
                Ok(report) => {
                    info!(
                        "{} {}: {} nondominated, {} f-evals",
                        problem.name(),
                        solver,
                        report.front().len(),
                        report.f_evals
                    );
                    let wall_time = cfg.timing.then_some(report.wall_time);
                    Cell {
                        solver,
                        report: Some(report),
                        metrics: None,
                        error: None,
                        wall_time,
                    }
                }
                Err(e) => {
                    error!("{} {}: {e}", problem.name(), solver);
                    Cell {
                        solver,
                        report: None,
                        metrics: None,
                        error: Some(e.to_string()),
                        wall_time: None,
                    }
                }
            },
        )
        .collect();

    let fronts: Vec<Vec<Vec<f64>>> = cells
        .iter()
        .filter_map(|c| c.report.as_ref())
        .map(|r| r.front().objectives())
        .collect();
    let refs: Vec<&[Vec<f64>]> = fronts.iter().map(Vec::as_slice).collect();
    let reference = reference_point(&refs).ok();
    let ends = if problem.m() == 2 {
        problems::true_front_sample(spec, FRONT_SAMPLE).and_then(|t| extremes(&t))
    } else {
        None
    };
    if let Some(reference) = &reference {
        for cell in cells.iter_mut() {
            let Some(report) = &cell.report else { continue };
            match MetricReport::evaluate(
                &report.front().objectives(),
                reference,
                ends.as_ref(),
                report.f_evals,
                report.jac_evals,
            ) {
                Ok(m) => cell.metrics = Some(m),
                Err(e) => {
                    error!("{} {}: metrics failed: {e}", problem.name(), cell.solver);
                    cell.error = Some(e.to_string());
                }
            }
        }
    }
    ProblemOutcome {
        problem: info,
        params: Some(params),
        reference,
        cells,
    }
}

/// Runs every problem on a pool of `jobs` workers (all cores when `None`).
pub fn run_experiment(
    cfg: &ExperimentConfig,
    specs: &[ProblemSpec],
    jobs: Option<usize>,
) -> anyhow::Result<Vec<ProblemOutcome>> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder.build()?;
    Ok(pool.install(|| {
        specs
            .par_iter()
            .map(|spec| run_problem(cfg, spec))
            .collect()
    }))
}

#[derive(Serialize)]
struct CellFile<'a> {
    problem: &'a ProblemInfo,
    params: &'a Option<SolverParams>,
    reference: &'a Option<Vec<f64>>,
    #[serde(flatten)]
    cell: &'a Cell,
}

/// Writes the files enabled in `cfg` under `out`.
pub fn write_outputs(
    cfg: &ExperimentConfig,
    outcomes: &[ProblemOutcome],
    out: &Path,
) -> anyhow::Result<()> {
    if !(cfg.emit_csv || cfg.emit_json || cfg.emit_plotdata) {
        return Ok(());
    }
    output::ensure_dir(out)?;
    if cfg.emit_csv {
        let rows: Vec<SummaryRow> = outcomes
            .iter()
            .flat_map(ProblemOutcome::summary_rows)
            .collect();
        output::write_summary(&out.join("summary.csv"), &rows)?;
        for o in outcomes {
            let fronts: Vec<_> = o
                .cells
                .iter()
                .filter_map(|c| c.report.as_ref().map(|r| (c.solver, r.front())))
                .collect();
            let path = out.join(format!("fronts_{}.csv", slug(&o.problem.name)));
            output::write_fronts(&path, &o.problem.name, o.problem.n, o.problem.m, &fronts)?;
        }
    }
    if cfg.emit_json {
        let dir = out.join("reports");
        output::ensure_dir(&dir)?;
        for o in outcomes {
            for c in &o.cells {
                let file = CellFile {
                    problem: &o.problem,
                    params: &o.params,
                    reference: &o.reference,
                    cell: c,
                };
                output::write_json(
                    &dir.join(format!(
                        "{}_{}.json",
                        slug(&o.problem.name),
                        c.solver.label()
                    )),
                    &file,
                )?;
            }
        }
    }
    if cfg.emit_plotdata {
        let dir = out.join("plot");
        output::ensure_dir(&dir)?;
        for o in outcomes {
            for c in &o.cells {
                let Some(r) = &c.report else { continue };
                let stem = format!("{}_{}", slug(&o.problem.name), c.solver.label());
                output::write_points_dat(
                    &dir.join(format!("{stem}.dat")),
                    &stem,
                    &r.front().objectives(),
                )?;
            }
        }
    }
    Ok(())
}

/// Extra plot data for the `front` command: PF and PFG of every run.
pub fn write_front_scatter(outcome: &ProblemOutcome, out: &Path) -> anyhow::Result<()> {
    output::ensure_dir(out)?;
    for c in &outcome.cells {
        let Some(r) = &c.report else { continue };
        let stem = format!("{}_{}", slug(&outcome.problem.name), c.solver.label());
        output::write_points_dat(
            &out.join(format!("{stem}_pf.dat")),
            &format!("{stem} PF"),
            &r.pf.objectives(),
        )?;
        output::write_points_dat(
            &out.join(format!("{stem}_pfg.dat")),
            &format!("{stem} PFG"),
            &r.pfg.objectives(),
        )?;
    }
    Ok(())
}
