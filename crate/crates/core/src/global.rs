//! Global phase: escaping a local front by descending the global descent
//! functions from candidates placed around the current anchor.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gdf::{a_mu_prime, GdfContext, VParams};
use crate::linalg::{dist, dot, min_norm, norm};
use crate::local::{local_solve, LocalOptions, MAX_CONTRACTIONS};
use crate::params::SolverParams;
use crate::pareto::strictly_better;
use crate::problem::{BoundsInfo, BoxProblem, Evaluator};

/// A step counts as hitting the boundary when clipping moved any coordinate
/// by more than this.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Uniform redraws allowed per candidate slot.
pub const MAX_REDRAWS: usize = 100;

/// Loop variables of the global phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalPhaseState {
    pub anchor: Vec<f64>,
    pub f_anchor: Vec<f64>,
    pub mu: f64,
    pub rho: f64,
    /// Current (adaptive) lower bound on `rho`.
    pub rho_l: f64,
    pub candidate_index: usize,
    pub candidates: Vec<Vec<f64>>,
    /// Total `(mu, rho)` reductions applied at this anchor.
    pub reductions: usize,
    pub bounds: BoundsInfo,
}

impl GlobalPhaseState {
    pub fn new(
        anchor: Vec<f64>,
        f_anchor: Vec<f64>,
        params: &SolverParams,
        bounds: BoundsInfo,
    ) -> Self {
        Self {
            anchor,
            f_anchor,
            mu: params.mu_ini,
            rho: params.rho_ini,
            rho_l: params.rho_l,
            candidate_index: 0,
            candidates: Vec::new(),
            reductions: 0,
            bounds,
        }
    }

    /// Moves to a new anchor with fresh parameters.
    pub fn reanchor(&mut self, anchor: Vec<f64>, f_anchor: Vec<f64>, params: &SolverParams) {
        let bounds = self.bounds;
        *self = Self::new(anchor, f_anchor, params, bounds);
    }

    pub fn context<'p>(
        &self,
        problem: &'p BoxProblem,
        params: &SolverParams,
    ) -> Result<GdfContext<'p>> {
        let v = VParams::new(self.mu, params.c, params.tau)?;
        GdfContext::with_anchor_value(
            problem,
            self.anchor.clone(),
            self.f_anchor.clone(),
            v,
            self.rho,
        )
    }
}

/// Candidate starting points outside the `eps`-ball around `anchor`.
///
/// Slot `2i` tries `anchor + r_i e_i` and slot `2i + 1` tries `anchor - r_i e_i`
/// with `r_i = max(2 eps, 0.05 (ub_i - lb_i))`, clipped to the box. A slot that
/// ends up within `eps` of the anchor is redrawn uniformly from the box up to
/// 100 times and dropped if every redraw fails.
pub fn generate_candidates(
    problem: &BoxProblem,
    anchor: &[f64],
    eps: f64,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter {
            name: "eps",
            reason: format!("{eps} must be positive"),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = problem.n();
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..n {
        let r = (2.0 * eps).max(0.05 * (problem.ub()[i] - problem.lb()[i]));
        for sign in [1.0, -1.0] {
            let mut p = anchor.to_vec();
            p[i] += sign * r;
            problem.clip(&mut p);
            if dist(&p, anchor) > eps {
                out.push(p);
                continue;
            }
            for _ in 0..MAX_REDRAWS {
                let q = problem.sample_uniform(&mut rng);
                if dist(&q, anchor) > eps {
                    out.push(q);
                    break;
                }
            }
        }
    }
    if out.is_empty() {
        return Err(Error::CandidateExhausted { eps });
    }
    Ok(out)
}

/// Adaptive lower bound on `rho` at `z`.
///
/// With `s = z - anchor` and `I3` the objectives improved at `z`, the bound is
/// `max_j A'(f_j(z) - f_j(anchor)) * (s . grad f_j) * ||s|| / (s . s)` over
/// `j` in `I3` with a positive directional derivative. It is adopted when it is
/// below `rho_u` (and floored at `nominal`); otherwise the nominal value is
/// returned.
pub fn update_rho_l(
    ctx: &GdfContext<'_>,
    z: &[f64],
    fz: &[f64],
    jac: &[Vec<f64>],
    rho_u: f64,
    nominal: f64,
) -> f64 {
    let s: Vec<f64> = z.iter().zip(ctx.anchor()).map(|(a, b)| a - b).collect();
    let ss = dot(&s, &s);
    if ss == 0.0 {
        return nominal;
    }
    let v = ctx.v_params();
    let mut candidate: f64 = 0.0;
    for (j, g) in jac.iter().enumerate() {
        let diff = fz[j] - ctx.f_anchor()[j];
        if diff >= 0.0 {
            continue;
        }
        let sg = dot(&s, g);
        if sg > 0.0 {
            candidate = candidate.max(a_mu_prime(diff, &v) * sg * ss.sqrt() / ss);
        }
    }
    if candidate.is_finite() && candidate < rho_u {
        candidate.max(nominal)
    } else {
        nominal
    }
}

/// Parameters accepted by [`reduce_params`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reduction {
    pub mu: f64,
    pub rho: f64,
    /// Number of `l`-fold reductions applied.
    pub steps: usize,
}

/// Checks the descent conditions of every `G_j` at `z` for `(mu, rho)`.
fn descent_conditions_hold(
    ctx: &GdfContext<'_>,
    z: &[f64],
    fz: &[f64],
    jac: &[Vec<f64>],
    kappa: f64,
) -> bool {
    match ctx.grads_at(z, fz, jac) {
        Ok(grads) => {
            grads.iter().all(|g| {
                let slope = ctx.radial_slope(g, z);
                let gn = norm(g);
                gn.is_finite() && gn > kappa && slope < 0.0
            }) && min_norm(&grads) > kappa
        }
        Err(_) => false,
    }
}

/// Shrinks `(mu, rho)` by `(mu_hat^l, rho_hat^l)` until every `G_j` has
/// `||grad G_j(z)|| > kappa` and `(z - anchor) . grad G_j(z) < 0`, and the
/// convex hull of the gradients stays more than `kappa` away from zero.
///
/// The current parameters are tried first. Fails with
/// [`Error::CandidateRejected`] after `max_param_reductions` reductions or
/// once `rho` would drop below `params.rho_l`.
pub fn reduce_params(
    state: &GlobalPhaseState,
    problem: &BoxProblem,
    z: &[f64],
    fz: &[f64],
    jac: &[Vec<f64>],
    params: &SolverParams,
) -> Result<Reduction> {
    let mu_factor = params.mu_hat.powi(params.l as i32);
    let rho_factor = params.rho_hat.powi(params.l as i32);
    let base = state.context(problem, params)?;
    let (mut mu, mut rho) = (state.mu, state.rho);
    for steps in 0..=params.max_param_reductions {
        if rho < params.rho_l || mu <= 0.0 {
            return Err(Error::CandidateRejected { reductions: steps });
        }
        let ctx = base.reparameterized(mu, rho)?;
        if descent_conditions_hold(&ctx, z, fz, jac, params.kappa) {
            return Ok(Reduction { mu, rho, steps });
        }
        mu *= mu_factor;
        rho *= rho_factor;
    }
    Err(Error::CandidateRejected {
        reductions: params.max_param_reductions,
    })
}

/// Why [`gdf_descent`] stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DescentReason {
    /// Reached a point strictly better than the anchor in every objective.
    EscapeFound,
    /// The accepted step was clipped by the box.
    BoundaryHit,
    /// The step cap was reached.
    IterationCap,
    /// No admissible `(mu, rho)` at the current point.
    ParamFloor,
    /// The line search could not satisfy the sufficient decrease test.
    Stalled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescentOutcome {
    pub z: Vec<f64>,
    pub fz: Vec<f64>,
    pub reason: DescentReason,
    pub steps: usize,
}

/// Descends the global descent functions from `z_start`.
///
/// Each iteration first checks for a strict improvement over the anchor, then
/// re-runs [`reduce_params`] at the current point and backtracks along the
/// unit ray direction `D = (z - anchor) / ||z - anchor||` from step
/// `alpha_bar_u`, requiring the Armijo inequality for every `G_j` at once.
/// `jac_start` is the Jacobian at `z_start` when the caller already has it.
pub fn gdf_descent(
    ev: &Evaluator<'_>,
    state: &mut GlobalPhaseState,
    z_start: &[f64],
    fz_start: &[f64],
    jac_start: Option<Vec<Vec<f64>>>,
    params: &SolverParams,
) -> Result<DescentOutcome> {
    let problem = ev.problem();
    let mut z = z_start.to_vec();
    let mut fz = fz_start.to_vec();
    let mut jac_next = jac_start;
    let finish = |z: Vec<f64>, fz: Vec<f64>, reason, steps| {
        Ok(DescentOutcome {
            z,
            fz,
            reason,
            steps,
        })
    };

    for steps in 0..params.max_descent_steps {
        if strictly_better(&fz, &state.f_anchor) {
            return finish(z, fz, DescentReason::EscapeFound, steps);
        }
        let jac = match jac_next.take() {
            Some(j) => j,
            None => ev.jacobian(&z),
        };
        let red = match reduce_params(state, problem, &z, &fz, &jac, params) {
            Ok(r) => r,
            Err(Error::CandidateRejected { .. }) => {
                return finish(z, fz, DescentReason::ParamFloor, steps)
            }
            Err(e) => return Err(e),
        };
        state.mu = red.mu;
        state.rho = red.rho;
        state.reductions += red.steps;

        let ctx = state.context(problem, params)?;
        let grads = ctx.grads_at(&z, &fz, &jac)?;
        let r = dist(&z, &state.anchor);
        let d: Vec<f64> = z
            .iter()
            .zip(&state.anchor)
            .map(|(a, b)| (a - b) / r)
            .collect();
        debug_assert!(grads.iter().all(|g| dot(g, &d) < 0.0));
        let g0 = ctx.values_at(&z, &fz);

        let mut alpha = params.alpha_bar_u;
        let mut accepted = None;
        for _ in 0..=MAX_CONTRACTIONS {
            let raw: Vec<f64> = z.iter().zip(&d).map(|(zi, di)| zi + alpha * di).collect();
            let mut trial = raw.clone();
            problem.clip(&mut trial);
            let f_trial = ev.eval(&trial);
            let g_trial = ctx.values_at(&trial, &f_trial);
            let disp: Vec<f64> = trial.iter().zip(&z).map(|(a, b)| a - b).collect();
            if disp.iter().all(|&x| x == 0.0) {
                // already on the boundary with the ray pointing outward
                return finish(z, fz, DescentReason::BoundaryHit, steps);
            }
            let ok =
                g_trial.iter().zip(&g0).zip(&grads).all(|((gt, g), grad)| {
                    gt.is_finite() && *gt <= g + params.beta * dot(grad, &disp)
                });
            if ok {
                let clipped = raw
                    .iter()
                    .zip(&trial)
                    .any(|(a, b)| (a - b).abs() > BOUNDARY_TOL);
                accepted = Some((trial, f_trial, clipped));
                break;
            }
            alpha *= params.contraction;
        }
        let Some((trial, f_trial, clipped)) = accepted else {
            return finish(z, fz, DescentReason::Stalled, steps);
        };
        z = trial;
        fz = f_trial;
        if clipped {
            let reason = if strictly_better(&fz, &state.f_anchor) {
                DescentReason::EscapeFound
            } else {
                DescentReason::BoundaryHit
            };
            return finish(z, fz, reason, steps + 1);
        }
    }
    let reason = if strictly_better(&fz, &state.f_anchor) {
        DescentReason::EscapeFound
    } else {
        DescentReason::IterationCap
    };
    finish(z, fz, reason, params.max_descent_steps)
}

/// A local weak efficient solution visited by a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnchorRecord {
    pub x: Vec<f64>,
    pub fx: Vec<f64>,
}

/// Tallies of descent terminations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescentTally {
    pub escapes: usize,
    pub boundary_hits: usize,
    pub iteration_caps: usize,
    pub param_floors: usize,
    pub stalls: usize,
    /// Candidates that were already strictly better than the anchor.
    pub entry_escapes: usize,
}

impl DescentTally {
    pub fn record(&mut self, reason: DescentReason) {
        match reason {
            DescentReason::EscapeFound => self.escapes += 1,
            DescentReason::BoundaryHit => self.boundary_hits += 1,
            DescentReason::IterationCap => self.iteration_caps += 1,
            DescentReason::ParamFloor => self.param_floors += 1,
            DescentReason::Stalled => self.stalls += 1,
        }
    }

    pub fn add(&mut self, other: &DescentTally) {
        self.escapes += other.escapes;
        self.boundary_hits += other.boundary_hits;
        self.iteration_caps += other.iteration_caps;
        self.param_floors += other.param_floors;
        self.stalls += other.stalls;
        self.entry_escapes += other.entry_escapes;
    }
}

/// Result of one start of the full method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    /// Anchors in visiting order; the first is the plain local solution and
    /// the last is the best found.
    pub anchors: Vec<AnchorRecord>,
    pub local_iterations: usize,
    pub rounds: usize,
    pub descents: DescentTally,
    /// Set when the run ended because no candidate could be placed.
    pub exhausted: bool,
}

impl RunOutcome {
    pub fn first(&self) -> &AnchorRecord {
        &self.anchors[0]
    }

    pub fn last(&self) -> &AnchorRecord {
        self.anchors.last().expect("a run has at least one anchor")
    }
}

/// Runs local search from `z0` followed by the global phase.
///
/// Each round tries every candidate: refresh `rho_l`, return to local search
/// on a strict improvement, otherwise descend. An escape re-enters the local
/// search and restarts the global phase at the new anchor with fresh
/// parameters. After a round without escape `rho` shrinks by `rho_hat` and `mu`
/// is reset; the run stops once `rho < rho_l`.
pub fn mogdm_run(
    ev: &Evaluator<'_>,
    params: &SolverParams,
    bounds: BoundsInfo,
    z0: &[f64],
    seed: u64,
) -> Result<RunOutcome> {
    let problem = ev.problem();
    let local_opts = local_options(params);
    let first = local_solve(ev, z0, &local_opts)?;
    let mut local_iterations = first.iterations;
    let mut anchors = vec![AnchorRecord {
        x: first.x.clone(),
        fx: first.fx.clone(),
    }];
    let mut state = GlobalPhaseState::new(first.x, first.fx, params, bounds);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rounds = 0;
    let mut descents = DescentTally::default();
    let mut exhausted = false;

    'anchor: loop {
        loop {
            rounds += 1;
            state.candidates =
                match generate_candidates(problem, &state.anchor, params.eps, rng.gen()) {
                    Ok(c) => c,
                    Err(Error::CandidateExhausted { .. }) => {
                        exhausted = true;
                        break 'anchor;
                    }
                    Err(e) => return Err(e),
                };
            let mut escape = None;
            let candidates = std::mem::take(&mut state.candidates);
            for (i, c) in candidates.iter().enumerate() {
                state.candidate_index = i;
                let fz = ev.eval(c);
                if strictly_better(&fz, &state.f_anchor) {
                    descents.entry_escapes += 1;
                    escape = Some(c.clone());
                    break;
                }
                let jac = ev.jacobian(c);
                let ctx = state.context(problem, params)?;
                state.rho_l = update_rho_l(&ctx, c, &fz, &jac, params.rho_u, params.rho_l);
                let out = gdf_descent(ev, &mut state, c, &fz, Some(jac), params)?;
                descents.record(out.reason);
                if out.reason == DescentReason::EscapeFound {
                    escape = Some(out.z);
                    break;
                }
            }
            state.candidates = candidates;

            if let Some(z) = escape {
                if anchors.len() > params.max_reanchors {
                    break 'anchor;
                }
                let sol = local_solve(ev, &z, &local_opts)?;
                local_iterations += sol.iterations;
                anchors.push(AnchorRecord {
                    x: sol.x.clone(),
                    fx: sol.fx.clone(),
                });
                state.reanchor(sol.x, sol.fx, params);
                continue 'anchor;
            }
            state.rho *= params.rho_hat;
            state.mu = params.mu_ini;
            if state.rho < state.rho_l {
                break 'anchor;
            }
        }
    }
    Ok(RunOutcome {
        anchors,
        local_iterations,
        rounds,
        descents,
        exhausted,
    })
}

pub(crate) fn local_options(params: &SolverParams) -> LocalOptions {
    LocalOptions {
        tol: params.local_tol,
        max_iter: params.local_max_iter,
        beta: params.beta,
        contraction: params.contraction,
        alpha0: 1.0,
        curvature: params.local_curvature,
        utopia: params.utopia.clone(),
    }
}

/// Smallest norm over convex combinations of the `G_j` gradients at `z`.
pub fn gdf_min_norm(ctx: &GdfContext<'_>, z: &[f64], fz: &[f64], jac: &[Vec<f64>]) -> Result<f64> {
    Ok(min_norm(&ctx.grads_at(z, fz, jac)?))
}
