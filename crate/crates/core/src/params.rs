//! Tunables of the global descent method.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::BoxProblem;

/// Every tunable of the solver.
///
/// [`SolverParams::for_problem`] derives the problem-dependent defaults from the
/// box: `rho_ini = delta / (K + 1e-3)`, `rho_u = delta / K`,
/// `kappa = 1e-4 sqrt(n)`, and `eps = 1` when every box side is longer than 10
/// (otherwise `0.1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    pub mu_ini: f64,
    pub rho_ini: f64,
    /// Nominal lower bound on rho; also the floor of the reduction loop.
    pub rho_l: f64,
    pub rho_u: f64,
    pub rho_hat: f64,
    pub mu_hat: f64,
    pub kappa: f64,
    /// Radius of the deleted neighborhood around the anchor.
    pub eps: f64,
    /// Largest step of the global-phase line search.
    pub alpha_bar_u: f64,
    /// Armijo sufficient-decrease constant.
    pub beta: f64,
    /// Backtracking contraction ratio.
    pub contraction: f64,
    pub delta: f64,
    /// Reduction exponent applied per pass of the (mu, rho) loop.
    pub l: u32,
    pub tau: f64,
    pub c: f64,
    pub n_starts: usize,
    pub max_param_reductions: usize,
    pub seed: u64,
    /// Phase-1 stationarity tolerance on the steepest-descent direction norm.
    pub local_tol: f64,
    pub local_max_iter: usize,
    pub max_descent_steps: usize,
    pub max_reanchors: usize,
    /// Uniform samples drawn per retained start before spread filtering.
    pub spread_oversample: usize,
    pub bounds_samples: usize,
    /// Curvature-scaled local steps.
    #[serde(default = "enabled")]
    pub local_curvature: bool,
    /// Utopia point for the local search; filled in from the payoff table by
    /// the front drivers.
    #[serde(default)]
    pub utopia: Option<Vec<f64>>,
}

fn enabled() -> bool {
    true
}

impl SolverParams {
    pub fn for_problem(problem: &BoxProblem) -> Self {
        let n = problem.n();
        let k = problem.diameter();
        let delta = 0.01;
        let min_width = problem
            .lb()
            .iter()
            .zip(problem.ub())
            .map(|(l, u)| u - l)
            .fold(f64::INFINITY, f64::min);
        let eps = if min_width > 10.0 { 1.0 } else { 0.1 };
        Self {
            mu_ini: 0.5,
            rho_ini: delta / (k + 1e-3),
            rho_l: 1e-5,
            rho_u: delta / k,
            rho_hat: 0.35,
            mu_hat: 0.1,
            kappa: 1e-4 * (n as f64).sqrt(),
            eps,
            alpha_bar_u: 0.1,
            beta: 1e-4,
            contraction: 0.5,
            delta,
            l: 1,
            tau: 1.0,
            c: 0.5,
            n_starts: 200,
            max_param_reductions: 50,
            seed: 0,
            local_tol: 1e-6 * (n as f64).sqrt(),
            local_max_iter: 2000,
            max_descent_steps: 500,
            max_reanchors: 100,
            spread_oversample: 2,
            bounds_samples: 64,
            local_curvature: true,
            utopia: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_starts(mut self, n_starts: usize) -> Self {
        self.n_starts = n_starts;
        self
    }

    /// Checks every range constraint.
    pub fn validate(&self) -> Result<()> {
        fn open_unit(name: &'static str, v: f64) -> Result<()> {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    reason: format!("{v} not in (0, 1)"),
                })
            }
        }
        fn positive(name: &'static str, v: f64) -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    reason: format!("{v} must be positive and finite"),
                })
            }
        }
        fn at_least_one(name: &'static str, v: usize) -> Result<()> {
            if v >= 1 {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    reason: "must be >= 1".into(),
                })
            }
        }
        open_unit("mu_ini", self.mu_ini)?;
        open_unit("rho_hat", self.rho_hat)?;
        open_unit("mu_hat", self.mu_hat)?;
        open_unit("beta", self.beta)?;
        open_unit("contraction", self.contraction)?;
        open_unit("c", self.c)?;
        positive("rho_ini", self.rho_ini)?;
        positive("rho_l", self.rho_l)?;
        positive("rho_u", self.rho_u)?;
        positive("kappa", self.kappa)?;
        positive("eps", self.eps)?;
        positive("alpha_bar_u", self.alpha_bar_u)?;
        positive("delta", self.delta)?;
        positive("tau", self.tau)?;
        positive("local_tol", self.local_tol)?;
        if self.l == 0 {
            return Err(Error::InvalidParameter {
                name: "l",
                reason: "must be >= 1".into(),
            });
        }
        at_least_one("n_starts", self.n_starts)?;
        at_least_one("local_max_iter", self.local_max_iter)?;
        at_least_one("max_descent_steps", self.max_descent_steps)?;
        at_least_one("spread_oversample", self.spread_oversample)?;
        at_least_one("bounds_samples", self.bounds_samples)?;
        if let Some(u) = &self.utopia {
            if u.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "utopia",
                    reason: format!("{u:?} must be finite"),
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::FnObjectives;

    fn boxed(lb: f64, ub: f64, n: usize) -> BoxProblem {
        let f = FnObjectives {
            f: |_: &[f64]| vec![0.0, 0.0],
            jac: move |_: &[f64]| vec![vec![0.0; n]; 2],
        };
        BoxProblem::new("b", vec![lb; n], vec![ub; n], 2, f).unwrap()
    }

    #[test]
    fn defaults_follow_box_geometry() {
        let p = SolverParams::for_problem(&boxed(0.0, 1.0, 4));
        assert_eq!(p.eps, 0.1);
        assert!((p.rho_u - 0.005).abs() < 1e-15);
        assert!((p.rho_ini - 0.01 / 2.001).abs() < 1e-15);
        assert!((p.kappa - 2e-4).abs() < 1e-15);
        assert_eq!(
            (p.mu_ini, p.rho_hat, p.mu_hat, p.rho_l),
            (0.5, 0.35, 0.1, 1e-5)
        );
        assert_eq!(
            (p.alpha_bar_u, p.beta, p.contraction, p.l),
            (0.1, 1e-4, 0.5, 1)
        );
        assert_eq!((p.tau, p.c, p.n_starts), (1.0, 0.5, 200));
        p.validate().unwrap();

        assert_eq!(SolverParams::for_problem(&boxed(-6.0, 6.0, 2)).eps, 1.0);
        assert_eq!(SolverParams::for_problem(&boxed(-5.0, 5.0, 2)).eps, 0.1);
    }

    #[test]
    fn validation_catches_out_of_range_values() {
        let mut p = SolverParams::for_problem(&boxed(0.0, 1.0, 2));
        p.mu_ini = 1.0;
        assert!(matches!(
            p.validate(),
            Err(Error::InvalidParameter { name: "mu_ini", .. })
        ));
        let mut p = SolverParams::for_problem(&boxed(0.0, 1.0, 2));
        p.rho_ini = -1.0;
        assert!(p.validate().is_err());
        let mut p = SolverParams::for_problem(&boxed(0.0, 1.0, 2));
        p.n_starts = 0;
        assert!(p.validate().is_err());
    }
}
