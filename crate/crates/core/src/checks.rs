//! Invariant suites shared by the test targets and the `check` command.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::gdf::{a_mu, a_mu_prime, v_mu, v_mu_prime, GdfContext, VParams};
use crate::global::{reduce_params, GlobalPhaseState};
use crate::init::stage_rng;
use crate::linalg::{dot, min_norm, norm};
use crate::params::SolverParams;
use crate::problem::{estimate_bounds, jacobian_error};
use crate::problems;
use crate::Result;

/// `mu` values of the identity suites.
pub const MU_GRID: [f64; 5] = [0.05, 0.1, 0.3, 0.5, 0.9];

/// Outcome of one suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub samples: usize,
    pub violations: usize,
    /// Largest error or smallest margin seen, depending on the suite.
    pub worst: f64,
    /// First violation, if any.
    pub example: Option<String>,
}

impl CheckOutcome {
    fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            samples: 0,
            violations: 0,
            worst: 0.0,
            example: None,
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.samples += 1;
        if !ok {
            self.violations += 1;
            if self.example.is_none() {
                self.example = Some(describe());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0 && self.samples > 0
    }
}

fn unit_params(mu: f64) -> VParams {
    VParams::new(mu, 0.5, 1.0).expect("admissible grid")
}

/// `v(-tau) = 1`, `v(0) = mu`, `v >= c mu` on `[-50, 50]` and `v' < 0`.
pub fn v_conditions(samples: usize, seed: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new("v identities");
    let mut rng = stage_rng(seed, 11);
    for mu in MU_GRID {
        let p = unit_params(mu);
        let e1 = (v_mu(-1.0, &p) - 1.0).abs();
        let e0 = (v_mu(0.0, &p) - mu).abs();
        out.worst = out.worst.max(e1).max(e0);
        out.record(e1 < 1e-12, || format!("mu {mu}: |v(-tau) - 1| = {e1:e}"));
        out.record(e0 < 1e-12, || format!("mu {mu}: |v(0) - mu| = {e0:e}"));
        for _ in 0..samples {
            let y = rng.gen_range(-50.0..=50.0);
            let v = v_mu(y, &p);
            out.record(v >= 0.5 * mu - 1e-12, || {
                format!("mu {mu}: v({y}) = {v} below c mu")
            });
            let d = v_mu_prime(y, &p);
            out.record(d < 0.0, || format!("mu {mu}: v'({y}) = {d} not negative"));
        }
    }
    out
}

/// Properties of `v` and `A` below `-tau`, above 0 and at 0.
pub fn kernel_properties(samples: usize, seed: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new("A and v properties");
    let mut rng = stage_rng(seed, 12);
    for mu in MU_GRID {
        let p = unit_params(mu);
        let d0 = (a_mu_prime(0.0, &p) - mu).abs();
        out.record(d0 < 1e-15, || format!("mu {mu}: A'(0) - mu = {d0:e}"));
        for _ in 0..samples {
            let below = rng.gen_range(-50.0..-1.0);
            let v = v_mu(below, &p);
            out.record(v > 1.0, || format!("mu {mu}: v({below}) = {v} not above 1"));

            let above = rng.gen_range(0.0..=50.0);
            let v = v_mu(above, &p);
            out.record(v <= mu, || format!("mu {mu}: v({above}) = {v} above mu"));
            let d = a_mu_prime(above, &p);
            out.record(d <= mu + 1e-12, || {
                format!("mu {mu}: A'({above}) = {d} above mu")
            });

            let (a, b) = (rng.gen_range(-20.0..=-1.0), rng.gen_range(-20.0..=-1.0));
            let (y1, y2) = if a < b { (a, b) } else { (b, a) };
            if y1 < y2 {
                let gap = a_mu(y2, &p) - a_mu(y1, &p);
                out.record(0.0 < y2 - y1 && y2 - y1 < gap, || {
                    format!("mu {mu}: y1 {y1}, y2 {y2}, A gap {gap}")
                });
            }
        }
    }
    out
}

/// `mu c'` strictly decreases toward 0 as `mu` shrinks by decades.
pub fn mu_c_prime_vanishes() -> CheckOutcome {
    let mut out = CheckOutcome::new("mu c' decreasing");
    let values: Vec<f64> = [1e-1, 1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&mu| mu * unit_params(mu).c_prime())
        .collect();
    for w in values.windows(2) {
        out.record(w[1] < w[0] && w[1] > 0.0, || format!("sequence {values:?}"));
    }
    out.worst = *values.last().expect("four values");
    out
}

/// Normwise relative error `||a - b||_inf / max(1, ||a||_inf, ||b||_inf)`
/// against central differences.
///
/// Entrywise ratios are meaningless here: far below the anchor `G_j` reaches
/// `1e70` and beyond, and the rounding error of a difference quotient swamps
/// components that are small next to the rest of the gradient. The step also
/// shrinks so that the exponent of `b^y` moves by at most `1e-4`.
fn gdf_fd_error(ctx: &GdfContext<'_>, j: usize, z: &[f64]) -> Result<f64> {
    let analytic = ctx.grad(j, z)?;
    let grad_f = &ctx.problem().jacobian(z)[j];
    let rate = ctx.v_params().base().ln().abs() / ctx.v_params().tau;
    let mut zp = z.to_vec();
    let mut numeric = Vec::with_capacity(z.len());
    for i in 0..z.len() {
        let h = (1e-6 * (1.0 + z[i].abs())).min(1e-4 / (rate * grad_f[i].abs()));
        zp[i] = z[i] + h;
        let up = ctx.value(j, &zp);
        zp[i] = z[i] - h;
        let down = ctx.value(j, &zp);
        zp[i] = z[i];
        numeric.push((up - down) / (2.0 * h));
    }
    let sup = |v: &[f64]| v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let diff: Vec<f64> = analytic.iter().zip(&numeric).map(|(a, b)| a - b).collect();
    Ok(sup(&diff) / 1f64.max(sup(&analytic)).max(sup(&numeric)))
}

/// Analytic gradients of the global descent functions against central
/// differences at `points` random `(problem, anchor, z, j, mu, rho)` draws.
pub fn gdf_gradients(points: usize, seed: u64) -> Result<CheckOutcome> {
    let mut out = CheckOutcome::new("gdf gradient");
    let mut rng = stage_rng(seed, 13);
    let specs = problems::registry();
    for k in 0..points {
        let spec = &specs[k % specs.len()];
        let p = &spec.problem;
        let anchor = p.sample_uniform(&mut rng);
        let z = p.sample_uniform(&mut rng);
        let mu = rng.gen_range(0.01..0.9);
        let rho = rng.gen_range(1e-3..1.0);
        let ctx = GdfContext::new(p, anchor, VParams::new(mu, 0.5, 1.0)?, rho)?;
        let j = rng.gen_range(0..p.m());
        let err = gdf_fd_error(&ctx, j, &z)?;
        out.worst = out.worst.max(err);
        out.record(err < 1e-5, || {
            format!("{} j {j}: relative error {err:e}", p.name())
        });
    }
    Ok(out)
}

/// Every registered Jacobian against central differences.
pub fn problem_jacobians(points_per_problem: usize, seed: u64) -> Vec<CheckOutcome> {
    let mut rng = stage_rng(seed, 14);
    problems::registry()
        .iter()
        .map(|spec| {
            let p = &spec.problem;
            let mut out = CheckOutcome::new(format!("{} jacobian", p.name()));
            for _ in 0..points_per_problem {
                let z = p.sample_uniform(&mut rng);
                let err = jacobian_error(p, &z);
                out.worst = out.worst.max(err);
                out.record(err < 1e-4, || format!("relative error {err:e} at {z:?}"));
            }
            out
        })
        .collect()
}

/// Lipschitz constant of the convex pair on `[-2, 2]^5`: the largest gradient
/// norm, `2 ||(3, 3, 3, 3, 3)||`.
pub const CONVEX_PAIR_LIPSCHITZ: f64 = 13.416_407_864_998_739;

/// The three invariants of the global descent functions on the convex pair
/// in five dimensions: basin exclusion, radial descent and no stationary
/// point, each at parameters accepted by the reduction loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescentChecks {
    pub basin_exclusion: CheckOutcome,
    pub radial_descent: CheckOutcome,
    pub no_stationary_point: CheckOutcome,
    /// Sampled points for which the reduction loop found no parameters.
    pub rejected: usize,
}

impl DescentChecks {
    pub fn passed(&self) -> bool {
        self.basin_exclusion.passed()
            && self.radial_descent.passed()
            && self.no_stationary_point.passed()
    }
}

/// Draws an anchor uniformly from `[-2, 2]^5`, a point `z` of its basin
/// complement, `rho` in `[rho_l, rho_ini]` (log-uniform) and
/// `mu < min(1, rho / L)`, then runs the reduction loop from `(mu, rho)` and
/// checks the accepted parameters. Repeats until `samples` points are accepted.
pub fn descent_invariants(samples: usize, seed: u64) -> Result<DescentChecks> {
    let problem = problems::get("CVX5")?.problem;
    let params = SolverParams::for_problem(&problem).with_seed(seed);
    let bounds = estimate_bounds(&problem, params.bounds_samples, seed)?;
    let mut rng = stage_rng(seed, 15);
    let mut checks = DescentChecks {
        basin_exclusion: CheckOutcome::new("basin exclusion"),
        radial_descent: CheckOutcome::new("radial descent"),
        no_stationary_point: CheckOutcome::new("no stationary point"),
        rejected: 0,
    };
    checks.no_stationary_point.worst = f64::INFINITY;
    let (log_lo, log_hi) = (params.rho_l.ln(), params.rho_ini.ln());
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < samples && attempts < 100 * samples {
        attempts += 1;
        let anchor = problem.sample_uniform(&mut rng);
        let f_anchor = problem.eval(&anchor);
        let z = problem.sample_uniform(&mut rng);
        let fz = problem.eval(&z);
        let mut state = GlobalPhaseState::new(anchor.clone(), f_anchor, &params, bounds);
        state.rho = rng.gen_range(log_lo..=log_hi).exp();
        state.mu = rng.gen_range(0.01..1.0) * 1f64.min(state.rho / CONVEX_PAIR_LIPSCHITZ);
        let base = state.context(&problem, &params)?;
        if !base.in_basin_complement_at(&z, &fz) {
            continue;
        }
        let jac = problem.jacobian(&z);
        let reduction = match reduce_params(&state, &problem, &z, &fz, &jac, &params) {
            Ok(r) => r,
            Err(_) => {
                checks.rejected += 1;
                continue;
            }
        };
        accepted += 1;
        let ctx = base.reparameterized(reduction.mu, reduction.rho)?;
        let values = ctx.values_at(&z, &fz);
        let grads = ctx.grads_at(&z, &fz, &jac)?;
        let s: Vec<f64> = z.iter().zip(&anchor).map(|(a, b)| a - b).collect();

        checks
            .basin_exclusion
            .record(values.iter().any(|&g| g < 0.0), || {
                format!(
                    "G = {values:?} at mu {}, rho {}",
                    reduction.mu, reduction.rho
                )
            });
        let slopes: Vec<f64> = grads.iter().map(|g| dot(&s, g) / norm(&s)).collect();
        checks
            .radial_descent
            .record(slopes.iter().all(|&d| d < 0.0), || {
                format!("slopes {slopes:?}")
            });
        let hull = min_norm(&grads);
        let margin = &mut checks.no_stationary_point.worst;
        *margin = margin.min(hull);
        checks.no_stationary_point.record(hull > params.kappa, || {
            format!("hull norm {hull:e} <= kappa {:e}", params.kappa)
        });
    }
    if accepted < samples {
        checks.basin_exclusion.record(false, || {
            format!("only {accepted} of {samples} points accepted")
        });
    }
    Ok(checks)
}

/// Every suite with its default sample counts.
pub fn run_all(seed: u64) -> Result<Vec<CheckOutcome>> {
    let mut out = vec![
        v_conditions(10_000, seed),
        kernel_properties(10_000, seed),
        mu_c_prime_vanishes(),
    ];
    out.push(gdf_gradients(200, seed)?);
    out.extend(problem_jacobians(200, seed));
    let t = descent_invariants(500, seed)?;
    out.extend([t.basin_exclusion, t.radial_descent, t.no_stationary_point]);
    Ok(out)
}
