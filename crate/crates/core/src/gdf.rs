//! The two-parameter global descent function family.
//!
//! For an anchor `x` with value `f(x)`, each objective `j` gets
//!
//! ```text
//! G_j(z) = A_mu(f_j(z) - f_j(x)) - rho * ||z - x||,    A_mu(y) = y * V_mu(y),
//! V_mu(y) = mu * ((1 - c) * b^(y / tau) + c),          b = mu (1 - c) / (1 - c mu).
//! ```
//!
//! `V_mu` equals 1 at `y = -tau`, equals `mu` at `y = 0`, stays above `c mu`
//! and is strictly decreasing, so `A_mu` flattens the objective difference
//! outside the anchor's basin while the `rho` term pushes away from the anchor.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dist, dot};
use crate::pareto::strictly_better;
use crate::problem::BoxProblem;

/// Exponent clamp for `b^(y / tau)`.
const EXP_CLAMP: f64 = 700.0;

/// Gradients are undefined closer than this to the anchor.
pub const ANCHOR_RADIUS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VParams {
    pub mu: f64,
    pub c: f64,
    pub tau: f64,
}

impl VParams {
    pub fn new(mu: f64, c: f64, tau: f64) -> Result<Self> {
        if !(mu > 0.0 && mu < 1.0) {
            return Err(Error::InvalidParameter {
                name: "mu",
                reason: format!("{mu} not in (0, 1)"),
            });
        }
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::InvalidParameter {
                name: "c",
                reason: format!("{c} not in (0, 1)"),
            });
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "tau",
                reason: format!("{tau} must be positive"),
            });
        }
        Ok(Self { mu, c, tau })
    }

    /// Base `b = mu (1 - c) / (1 - c mu)`, always in (0, 1).
    pub fn base(&self) -> f64 {
        self.mu * (1.0 - self.c) / (1.0 - self.c * self.mu)
    }

    /// `c' = (1 - c) |ln b| / tau`; `mu c'` bounds `|V'|` on `y >= 0`.
    pub fn c_prime(&self) -> f64 {
        (1.0 - self.c) * self.base().ln().abs() / self.tau
    }

    fn exponent(&self, y: f64) -> f64 {
        (y / self.tau) * self.base().ln()
    }

    fn power(&self, y: f64) -> f64 {
        self.exponent(y).clamp(-EXP_CLAMP, EXP_CLAMP).exp()
    }
}

pub fn v_mu(y: f64, p: &VParams) -> f64 {
    p.mu * ((1.0 - p.c) * p.power(y) + p.c)
}

/// Derivative of [`v_mu`] as computed, so zero where the exponent is clamped.
pub fn v_mu_prime(y: f64, p: &VParams) -> f64 {
    if p.exponent(y).abs() >= EXP_CLAMP {
        return 0.0;
    }
    p.mu * (1.0 - p.c) * p.base().ln() / p.tau * p.power(y)
}

pub fn a_mu(y: f64, p: &VParams) -> f64 {
    y * v_mu(y, p)
}

pub fn a_mu_prime(y: f64, p: &VParams) -> f64 {
    v_mu(y, p) + y * v_mu_prime(y, p)
}

/// A frozen anchor together with `(mu, c, tau, rho)`.
#[derive(Debug, Clone)]
pub struct GdfContext<'p> {
    problem: &'p BoxProblem,
    anchor: Vec<f64>,
    f_anchor: Vec<f64>,
    v: VParams,
    rho: f64,
}

impl<'p> GdfContext<'p> {
    /// Builds a context, evaluating `f` at the anchor.
    pub fn new(problem: &'p BoxProblem, anchor: Vec<f64>, v: VParams, rho: f64) -> Result<Self> {
        let f_anchor = problem.eval(&anchor);
        Self::with_anchor_value(problem, anchor, f_anchor, v, rho)
    }

    /// Builds a context from an already evaluated anchor value.
    pub fn with_anchor_value(
        problem: &'p BoxProblem,
        anchor: Vec<f64>,
        f_anchor: Vec<f64>,
        v: VParams,
        rho: f64,
    ) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "rho",
                reason: format!("{rho} must be positive"),
            });
        }
        if anchor.len() != problem.n() || f_anchor.len() != problem.m() {
            return Err(Error::ContractViolation(
                "anchor dimensions do not match the problem".into(),
            ));
        }
        Ok(Self {
            problem,
            anchor,
            f_anchor,
            v,
            rho,
        })
    }

    pub fn problem(&self) -> &'p BoxProblem {
        self.problem
    }

    pub fn anchor(&self) -> &[f64] {
        &self.anchor
    }

    pub fn f_anchor(&self) -> &[f64] {
        &self.f_anchor
    }

    pub fn v_params(&self) -> VParams {
        self.v
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Same anchor with different `(mu, rho)`.
    pub fn reparameterized(&self, mu: f64, rho: f64) -> Result<Self> {
        let v = VParams::new(mu, self.v.c, self.v.tau)?;
        Self::with_anchor_value(
            self.problem,
            self.anchor.clone(),
            self.f_anchor.clone(),
            v,
            rho,
        )
    }

    /// `G_j(z)` given `f(z)`.
    pub fn value_at(&self, j: usize, z: &[f64], fz: &[f64]) -> f64 {
        a_mu(fz[j] - self.f_anchor[j], &self.v) - self.rho * dist(z, &self.anchor)
    }

    /// `G_j(z) for every j` given `f(z)`.
    pub fn values_at(&self, z: &[f64], fz: &[f64]) -> Vec<f64> {
        (0..fz.len()).map(|j| self.value_at(j, z, fz)).collect()
    }

    /// `grad G_j(z)` given `f_j(z)` and `grad f_j(z)`.
    pub fn grad_at(&self, j: usize, z: &[f64], fz: &[f64], grad_fj: &[f64]) -> Result<Vec<f64>> {
        let r = dist(z, &self.anchor);
        if r < ANCHOR_RADIUS {
            return Err(Error::AnchorSingularity { distance: r });
        }
        let slope = a_mu_prime(fz[j] - self.f_anchor[j], &self.v);
        Ok(grad_fj
            .iter()
            .zip(z.iter().zip(&self.anchor))
            .map(|(g, (zi, ai))| slope * g - self.rho * (zi - ai) / r)
            .collect())
    }

    /// Gradients of every `G_j` given `f(z)` and the Jacobian of `f` at `z`.
    pub fn grads_at(&self, z: &[f64], fz: &[f64], jac: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        jac.iter()
            .enumerate()
            .map(|(j, g)| self.grad_at(j, z, fz, g))
            .collect()
    }

    /// `G_j(z)`, evaluating the problem.
    pub fn value(&self, j: usize, z: &[f64]) -> f64 {
        self.value_at(j, z, &self.problem.eval(z))
    }

    /// `grad G_j(z)`, evaluating the problem.
    pub fn grad(&self, j: usize, z: &[f64]) -> Result<Vec<f64>> {
        let r = dist(z, &self.anchor);
        if r < ANCHOR_RADIUS {
            return Err(Error::AnchorSingularity { distance: r });
        }
        let fz = self.problem.eval(z);
        let jac = self.problem.jacobian(z);
        self.grad_at(j, z, &fz, &jac[j])
    }

    /// Directional derivative of `G_j` along `z - anchor` (not normalized).
    pub fn radial_slope(&self, grad_gj: &[f64], z: &[f64]) -> f64 {
        let s: Vec<f64> = z.iter().zip(&self.anchor).map(|(a, b)| a - b).collect();
        dot(&s, grad_gj)
    }

    /// `z` lies in the basin complement: `z != anchor` and some objective is
    /// not improved, i.e. `f(z) < f(anchor)` fails componentwise.
    pub fn in_basin_complement_at(&self, z: &[f64], fz: &[f64]) -> bool {
        dist(z, &self.anchor) >= ANCHOR_RADIUS && !strictly_better(fz, &self.f_anchor)
    }

    pub fn in_basin_complement(&self, z: &[f64]) -> bool {
        self.in_basin_complement_at(z, &self.problem.eval(z))
    }
}
