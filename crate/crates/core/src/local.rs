//! Local search: projected multiobjective steepest descent with a vector
//! Armijo rule.
//!
//! The search direction minimizes `max_j grad f_j(z) . d + ||d||^2 / 2` over
//! `d` with `z + d` in the box. Away from the bounds this is
//! `d = -sum_j lambda_j grad f_j(z)` with `lambda` the minimum-norm simplex
//! weights. `d = 0` is exactly the first-order condition for weak efficiency
//! on the box, so `||d||` doubles as the stationarity measure.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{box_model_direction, box_steepest_direction, dot, norm};
use crate::problem::{BoxProblem, Evaluator};

/// Backtracking gives up after this many contractions.
pub const MAX_CONTRACTIONS: usize = 60;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescentStep {
    pub direction: Vec<f64>,
    /// Simplex weights of the minimum-norm gradient combination.
    pub multipliers: Vec<f64>,
    /// Subproblem value `max_j grad f_j . d + ||d||^2 / 2`; zero exactly at
    /// critical points.
    pub theta: f64,
    /// Directional derivatives `grad f_j(z) . d`.
    pub slopes: Vec<f64>,
}

impl DescentStep {
    pub fn norm(&self) -> f64 {
        norm(&self.direction)
    }
}

/// Steepest common descent direction at `z` given the Jacobian `jac`,
/// restricted so that `z + d` stays in the box.
pub fn steepest_direction(problem: &BoxProblem, z: &[f64], jac: &[Vec<f64>]) -> DescentStep {
    let lo: Vec<f64> = problem
        .lb()
        .iter()
        .zip(z)
        .map(|(l, zi)| (l - zi).min(0.0))
        .collect();
    let hi: Vec<f64> = problem
        .ub()
        .iter()
        .zip(z)
        .map(|(u, zi)| (u - zi).max(0.0))
        .collect();
    let (direction, multipliers) = box_steepest_direction(jac, &lo, &hi);
    let slopes: Vec<f64> = jac.iter().map(|g| dot(g, &direction)).collect();
    let theta = slopes.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        + 0.5 * dot(&direction, &direction);
    DescentStep {
        direction,
        multipliers,
        theta,
        slopes,
    }
}

/// Diagonal curvature entries are floored at this fraction of the largest
/// entry for the same coordinate (and at this value).
pub const CURVATURE_FLOOR: f64 = 1e-6;

/// Per-objective diagonal curvature `|d^2 f_j / dz_i^2|` at `z` by forward
/// differences of the Jacobian, floored by [`CURVATURE_FLOOR`].
pub fn diagonal_curvature(ev: &Evaluator<'_>, z: &[f64], jac: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let problem = ev.problem();
    let mut curv = vec![vec![0.0; z.len()]; jac.len()];
    let mut probe = z.to_vec();
    for i in 0..z.len() {
        let mut h = 1e-7 * (1.0 + z[i].abs());
        if z[i] + h > problem.ub()[i] {
            h = -h;
        }
        probe[i] = z[i] + h;
        let shifted = ev.jacobian(&probe);
        probe[i] = z[i];
        for (c, (a, b)) in curv.iter_mut().zip(shifted.iter().zip(jac)) {
            c[i] = ((a[i] - b[i]) / h).abs();
        }
    }
    for i in 0..z.len() {
        let top = curv.iter().map(|c| c[i]).fold(1.0, f64::max);
        for c in curv.iter_mut() {
            c[i] = c[i].max(CURVATURE_FLOOR * top);
        }
    }
    curv
}

/// Objective gaps to the utopia point are floored at this value.
pub const UTOPIA_GAP_FLOOR: f64 = 1e-12;

/// Fraction of the distance to a bound a curvature-scaled step may cover.
pub const BOUNDARY_FRACTION: f64 = 0.99;

/// Direction minimizing the worst diagonal quadratic model
/// `grad f_j . d + d' diag(curv_j) d / 2` with `z + d` inside the box
/// shrunk toward `z` by [`BOUNDARY_FRACTION`].
pub fn model_direction(
    problem: &BoxProblem,
    z: &[f64],
    jac: &[Vec<f64>],
    curv: &[Vec<f64>],
) -> DescentStep {
    let lo: Vec<f64> = problem
        .lb()
        .iter()
        .zip(z)
        .map(|(l, zi)| BOUNDARY_FRACTION * (l - zi).min(0.0))
        .collect();
    let hi: Vec<f64> = problem
        .ub()
        .iter()
        .zip(z)
        .map(|(u, zi)| BOUNDARY_FRACTION * (u - zi).max(0.0))
        .collect();
    let (direction, multipliers) = box_model_direction(jac, curv, &lo, &hi);
    let slopes: Vec<f64> = jac.iter().map(|g| dot(g, &direction)).collect();
    let theta = slopes
        .iter()
        .zip(curv)
        .map(|(s, c)| {
            s + 0.5
                * direction
                    .iter()
                    .zip(c)
                    .map(|(d, ci)| ci * d * d)
                    .sum::<f64>()
        })
        .fold(f64::NEG_INFINITY, f64::max);
    DescentStep {
        direction,
        multipliers,
        theta,
        slopes,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineSearchOutcome {
    pub z: Vec<f64>,
    pub fz: Vec<f64>,
    pub alpha: f64,
}

/// Vector Armijo backtracking along `step.direction`.
///
/// Tries `alpha0 * r^k`, clipping each trial to the box, and accepts the first
/// trial `z'` with `f_j(z') <= f_j(z) + beta * grad f_j(z) . (z' - z)` for every
/// `j`. For unclipped trials `z' - z = alpha d`.
#[allow(clippy::too_many_arguments)]
pub fn armijo_vector_search(
    ev: &Evaluator<'_>,
    z: &[f64],
    fz: &[f64],
    jac: &[Vec<f64>],
    step: &DescentStep,
    beta: f64,
    r: f64,
    alpha0: f64,
) -> Result<LineSearchOutcome> {
    if !(step.theta < 0.0) {
        return Err(Error::ContractViolation(
            "line search along a zero direction".into(),
        ));
    }
    if !(alpha0 > 0.0) {
        return Err(Error::ContractViolation(format!(
            "initial step {alpha0} must be positive"
        )));
    }
    let problem = ev.problem();
    let mut alpha = alpha0;
    for _ in 0..=MAX_CONTRACTIONS {
        let mut trial: Vec<f64> = z
            .iter()
            .zip(&step.direction)
            .map(|(zi, di)| zi + alpha * di)
            .collect();
        problem.clip(&mut trial);
        let disp: Vec<f64> = trial.iter().zip(z).map(|(a, b)| a - b).collect();
        let f_trial = ev.eval(&trial);
        let accepted = jac.iter().enumerate().all(|(j, g)| {
            let slope = dot(g, &disp);
            slope <= 0.0 && f_trial[j] <= fz[j] + beta * slope
        });
        if accepted && disp.iter().any(|&x| x != 0.0) {
            return Ok(LineSearchOutcome {
                z: trial,
                fz: f_trial,
                alpha,
            });
        }
        alpha *= r;
    }
    Err(Error::LineSearchStalled {
        contractions: MAX_CONTRACTIONS,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalSolution {
    pub x: Vec<f64>,
    pub fx: Vec<f64>,
    /// Direction at the returned point.
    pub step: DescentStep,
    /// Accepted line-search steps.
    pub iterations: usize,
    /// `||d|| <= tol` was reached (as opposed to a stalled search or the
    /// iteration cap).
    pub converged: bool,
}

/// Armijo constants of the local search.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub beta: f64,
    pub contraction: f64,
    pub alpha0: f64,
    /// Step along [`model_direction`] instead of the steepest direction.
    pub curvature: bool,
    /// Point strictly below the attainable objective values. When set, the
    /// direction is computed for `log(f_j - u_j)` instead of `f_j`.
    pub utopia: Option<Vec<f64>>,
}

impl LocalOptions {
    /// `tol = 1e-6 sqrt(n)`, 2000 iterations, `beta = 1e-4`, `r = 0.5`, unit
    /// initial step, curvature scaling on.
    pub fn for_dimension(n: usize) -> Self {
        Self {
            tol: 1e-6 * (n as f64).sqrt(),
            max_iter: 2000,
            beta: 1e-4,
            contraction: 0.5,
            alpha0: 1.0,
            curvature: true,
            utopia: None,
        }
    }
}

/// Runs descent from `z0` until the steepest direction has `||d|| <= tol`,
/// the line search stalls (treated as criticality), or `max_iter` steps.
///
/// Every accepted step decreases all objectives, so `f(x) <= f(z0)`
/// componentwise.
pub fn local_solve(ev: &Evaluator<'_>, z0: &[f64], opts: &LocalOptions) -> Result<LocalSolution> {
    let problem = ev.problem();
    if z0.len() != problem.n() {
        return Err(Error::ContractViolation(format!(
            "start has dimension {}, problem has {}",
            z0.len(),
            problem.n()
        )));
    }
    let mut z = z0.to_vec();
    problem.clip(&mut z);
    let mut fz = ev.eval(&z);
    let mut iterations = 0;
    loop {
        let jac = ev.jacobian(&z);
        let step = steepest_direction(problem, &z, &jac);
        if step.norm() <= opts.tol {
            return Ok(LocalSolution {
                x: z,
                fx: fz,
                step,
                iterations,
                converged: true,
            });
        }
        if iterations >= opts.max_iter {
            return Ok(LocalSolution {
                x: z,
                fx: fz,
                step,
                iterations,
                converged: false,
            });
        }
        let weights: Vec<f64> = match &opts.utopia {
            Some(u) => fz
                .iter()
                .zip(u)
                .map(|(f, u)| 1.0 / (f - u).max(UTOPIA_GAP_FLOOR))
                .collect(),
            None => vec![1.0; fz.len()],
        };
        let weighted: Vec<Vec<f64>> = jac
            .iter()
            .zip(&weights)
            .map(|(g, w)| g.iter().map(|x| x * w).collect())
            .collect();
        let mut search = if opts.utopia.is_some() {
            steepest_direction(problem, &z, &weighted)
        } else {
            step.clone()
        };
        if opts.curvature {
            let mut curv = diagonal_curvature(ev, &z, &jac);
            for (c, w) in curv.iter_mut().zip(&weights) {
                c.iter_mut().for_each(|x| *x *= w);
            }
            let scaled = model_direction(problem, &z, &weighted, &curv);
            if scaled.theta < 0.0 {
                search = scaled;
            }
        }
        if !(search.theta < 0.0) {
            search = step.clone();
        }
        if !(search.theta < 0.0) {
            return Ok(LocalSolution {
                x: z,
                fx: fz,
                step,
                iterations,
                converged: false,
            });
        }
        match armijo_vector_search(
            ev,
            &z,
            &fz,
            &jac,
            &search,
            opts.beta,
            opts.contraction,
            opts.alpha0,
        ) {
            Ok(out) => {
                z = out.z;
                fz = out.fz;
                iterations += 1;
            }
            Err(Error::LineSearchStalled { .. }) => {
                return Ok(LocalSolution {
                    x: z,
                    fx: fz,
                    step,
                    iterations,
                    converged: false,
                });
            }
            Err(e) => return Err(e),
        }
    }
}
