//! Experiment configuration: a flat TOML table.
//!
//! ```toml
//! problems = ["GDTEST1", "ZDT1"]   # or ["all"]
//! solvers = ["mogdm", "local-only"]
//! starts = 200
//! seed = 1
//! out = "results"
//! emit_csv = true
//! emit_json = true
//! emit_plotdata = true
//! timing = false                   # fill the wall_time column
//! rho_hat = 0.35                   # any solver parameter below
//! ```

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use mogdm::front::Solver;
use mogdm::problems::{self, ProblemSpec};
use mogdm::SolverParams;
use serde::{Deserialize, Serialize};

fn default_solvers() -> Vec<Solver> {
    Solver::ALL.to_vec()
}

fn default_starts() -> usize {
    200
}

fn default_seed() -> u64 {
    1
}

fn default_out() -> PathBuf {
    PathBuf::from("results")
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problems: Vec<String>,
    #[serde(default = "default_solvers")]
    pub solvers: Vec<Solver>,
    #[serde(default = "default_starts")]
    pub starts: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default = "yes")]
    pub emit_csv: bool,
    #[serde(default = "yes")]
    pub emit_json: bool,
    #[serde(default = "yes")]
    pub emit_plotdata: bool,
    /// Measure wall time. Off by default so that summaries are reproducible
    /// byte for byte.
    #[serde(default)]
    pub timing: bool,

    pub mu_ini: Option<f64>,
    pub rho_ini: Option<f64>,
    pub rho_l: Option<f64>,
    pub rho_u: Option<f64>,
    pub rho_hat: Option<f64>,
    pub mu_hat: Option<f64>,
    pub kappa: Option<f64>,
    pub eps: Option<f64>,
    pub alpha_bar_u: Option<f64>,
    pub beta: Option<f64>,
    pub contraction: Option<f64>,
    /// Also rescales `rho_ini` and `rho_u` unless those are given.
    pub delta: Option<f64>,
    pub c: Option<f64>,
    pub local_tol: Option<f64>,
    pub local_max_iter: Option<usize>,
    pub local_curvature: Option<bool>,
    pub max_param_reductions: Option<usize>,
    pub max_descent_steps: Option<usize>,
    pub max_reanchors: Option<usize>,
    pub spread_oversample: Option<usize>,
    pub bounds_samples: Option<usize>,
}

impl ExperimentConfig {
    /// Defaults for `problems`.
    pub fn for_problems(problems: Vec<String>) -> Self {
        let mut cfg: Self = toml::from_str("problems = []").expect("empty config parses");
        cfg.problems = problems;
        cfg
    }

    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Problems in configuration order; `"all"` expands to the registry.
    pub fn resolve_problems(&self) -> anyhow::Result<Vec<ProblemSpec>> {
        if self.problems.iter().any(|p| p.eq_ignore_ascii_case("all")) {
            return Ok(problems::registry());
        }
        self.problems
            .iter()
            .map(|name| Ok(problems::get(name)?))
            .collect()
    }

    /// Structural checks plus a parameter check against every problem.
    pub fn validate(&self) -> anyhow::Result<Vec<ProblemSpec>> {
        if self.problems.is_empty() {
            bail!("no problems configured");
        }
        if self.solvers.is_empty() {
            bail!("no solvers configured");
        }
        if self.starts == 0 {
            bail!("starts must be at least 1");
        }
        let specs = self.resolve_problems()?;
        for spec in &specs {
            self.params_for(spec)?;
        }
        Ok(specs)
    }

    /// Problem defaults with this configuration's overrides.
    pub fn params_for(&self, spec: &ProblemSpec) -> anyhow::Result<SolverParams> {
        let mut p = SolverParams::for_problem(&spec.problem)
            .with_starts(self.starts)
            .with_seed(self.seed);
        if let Some(delta) = self.delta {
            let k = spec.problem.diameter();
            p.delta = delta;
            p.rho_ini = delta / (k + 1e-3);
            p.rho_u = delta / k;
        }
        macro_rules! apply {
            ($($field:ident),*) => {
                $(if let Some(v) = self.$field {
                    p.$field = v;
                })*
            };
        }
        apply!(
            mu_ini,
            rho_ini,
            rho_l,
            rho_u,
            rho_hat,
            mu_hat,
            kappa,
            eps,
            alpha_bar_u,
            beta,
            contraction,
            c,
            local_tol,
            local_max_iter,
            local_curvature,
            max_param_reductions,
            max_descent_steps,
            max_reanchors,
            spread_oversample,
            bounds_samples
        );
        p.validate()
            .with_context(|| format!("parameters for {}", spec.name()))?;
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_takes_defaults() {
        let cfg = ExperimentConfig::from_toml("problems = [\"SCH\"]").unwrap();
        assert_eq!(cfg.solvers, Solver::ALL.to_vec());
        assert_eq!((cfg.starts, cfg.seed, cfg.timing), (200, 1, false));
        assert!(cfg.emit_csv && cfg.emit_json && cfg.emit_plotdata);
        assert_eq!(cfg.validate().unwrap().len(), 1);
    }

    #[test]
    fn unknown_keys_and_problems_are_rejected() {
        assert!(ExperimentConfig::from_toml("problems = [\"SCH\"]\nrho_hatt = 0.3").is_err());
        let cfg = ExperimentConfig::from_toml("problems = [\"nope\"]").unwrap();
        assert!(cfg.validate().is_err());
        assert!(ExperimentConfig::from_toml("problems = []")
            .unwrap()
            .validate()
            .is_err());
    }

    #[test]
    fn overrides_reach_the_parameters() {
        let cfg = ExperimentConfig::from_toml(
            "problems = [\"CVX5\"]\nrho_hat = 0.2\ndelta = 0.02\nstarts = 7",
        )
        .unwrap();
        let spec = problems::get("CVX5").unwrap();
        let p = cfg.params_for(&spec).unwrap();
        assert_eq!((p.rho_hat, p.n_starts), (0.2, 7));
        assert!((p.rho_u - 0.02 / spec.problem.diameter()).abs() < 1e-15);
        let bad = ExperimentConfig::from_toml("problems = [\"CVX5\"]\nmu_ini = 1.5").unwrap();
        assert!(bad.validate().is_err());
    }

    #[test]
    fn all_expands_to_the_registry() {
        let cfg = ExperimentConfig::for_problems(vec!["all".into()]);
        assert_eq!(
            cfg.resolve_problems().unwrap().len(),
            problems::registry().len()
        );
    }
}
