//! Multiobjective global descent on box-constrained problems.

pub mod checks;
pub mod error;
pub mod front;
pub mod gdf;
pub mod global;
pub mod init;
pub mod linalg;
pub mod local;
pub mod metrics;
pub mod params;
pub mod pareto;
pub mod problem;
pub mod problems;

pub use error::{Error, Result};
pub use front::{local_front, mogdm_front, RunReport, Solver};
pub use metrics::{
    benefit_to_cost, hypervolume, pareto_filter, performance_profile, MetricReport, ProfileCurve,
};
pub use params::SolverParams;
pub use pareto::{dominates, ArchiveEntry, ArchiveMode, ParetoArchive};
pub use problem::{BoxProblem, Evaluator, FnObjectives, Objectives};
