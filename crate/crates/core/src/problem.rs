//! Box-constrained multi-objective problems and evaluation accounting.

use std::cell::Cell;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dist, norm};

/// Objective vector and Jacobian of a smooth map `R^n -> R^m`.
///
/// Implementations must be pure; the solver evaluates them concurrently from
/// several threads.
pub trait Objectives: Send + Sync {
    fn eval(&self, z: &[f64]) -> Vec<f64>;

    /// Rows are the objective gradients: `jac[j][i] = d f_j / d z_i`.
    fn jacobian(&self, z: &[f64]) -> Vec<Vec<f64>>;
}

/// Adapter turning a pair of closures into [`Objectives`].
pub struct FnObjectives<F, J> {
    pub f: F,
    pub jac: J,
}

impl<F, J> Objectives for FnObjectives<F, J>
where
    F: Fn(&[f64]) -> Vec<f64> + Send + Sync,
    J: Fn(&[f64]) -> Vec<Vec<f64>> + Send + Sync,
{
    fn eval(&self, z: &[f64]) -> Vec<f64> {
        (self.f)(z)
    }

    fn jacobian(&self, z: &[f64]) -> Vec<Vec<f64>> {
        (self.jac)(z)
    }
}

type FrontFn = dyn Fn(usize) -> Vec<Vec<f64>> + Send + Sync;

/// A differentiable `m`-objective problem over the box `[lb, ub]`.
#[derive(Clone)]
pub struct BoxProblem {
    name: String,
    lb: Vec<f64>,
    ub: Vec<f64>,
    m: usize,
    objectives: Arc<dyn Objectives>,
    front: Option<Arc<FrontFn>>,
}

impl fmt::Debug for BoxProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoxProblem")
            .field("name", &self.name)
            .field("n", &self.n())
            .field("m", &self.m)
            .finish()
    }
}

impl BoxProblem {
    pub fn new(
        name: impl Into<String>,
        lb: Vec<f64>,
        ub: Vec<f64>,
        m: usize,
        objectives: impl Objectives + 'static,
    ) -> Result<Self> {
        Self::from_arc(name, lb, ub, m, Arc::new(objectives))
    }

    pub fn from_arc(
        name: impl Into<String>,
        lb: Vec<f64>,
        ub: Vec<f64>,
        m: usize,
        objectives: Arc<dyn Objectives>,
    ) -> Result<Self> {
        let name = name.into();
        if lb.is_empty() || lb.len() != ub.len() {
            return Err(Error::ProblemDefinition(format!(
                "{name}: bounds must be non-empty and of equal length"
            )));
        }
        if let Some(i) =
            (0..lb.len()).find(|&i| !(lb[i] < ub[i]) || !lb[i].is_finite() || !ub[i].is_finite())
        {
            return Err(Error::ProblemDefinition(format!(
                "{name}: need finite lb < ub, got [{}, {}] at coordinate {i}",
                lb[i], ub[i]
            )));
        }
        if m == 0 {
            return Err(Error::ProblemDefinition(format!("{name}: m must be >= 1")));
        }
        Ok(Self {
            name,
            lb,
            ub,
            m,
            objectives,
            front: None,
        })
    }

    /// Attaches a sampler of the analytic Pareto front.
    pub fn with_front(
        mut self,
        sampler: impl Fn(usize) -> Vec<Vec<f64>> + Send + Sync + 'static,
    ) -> Self {
        self.front = Some(Arc::new(sampler));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.lb.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn lb(&self) -> &[f64] {
        &self.lb
    }

    pub fn ub(&self) -> &[f64] {
        &self.ub
    }

    pub fn eval(&self, z: &[f64]) -> Vec<f64> {
        self.objectives.eval(z)
    }

    pub fn jacobian(&self, z: &[f64]) -> Vec<Vec<f64>> {
        self.objectives.jacobian(z)
    }

    pub fn has_front(&self) -> bool {
        self.front.is_some()
    }

    /// `count` points of the analytic front, or `None` when it is unknown.
    pub fn front_sample(&self, count: usize) -> Option<Vec<Vec<f64>>> {
        self.front.as_ref().map(|f| f(count))
    }

    /// Euclidean diameter `||ub - lb||` of the box.
    pub fn diameter(&self) -> f64 {
        dist(&self.ub, &self.lb)
    }

    pub fn midpoint(&self) -> Vec<f64> {
        self.lb
            .iter()
            .zip(&self.ub)
            .map(|(l, u)| 0.5 * (l + u))
            .collect()
    }

    pub fn contains(&self, z: &[f64]) -> bool {
        z.len() == self.n()
            && z.iter()
                .zip(self.lb.iter().zip(&self.ub))
                .all(|(x, (l, u))| x >= l && x <= u)
    }

    pub fn clip(&self, z: &mut [f64]) {
        for ((x, l), u) in z.iter_mut().zip(&self.lb).zip(&self.ub) {
            *x = x.clamp(*l, *u);
        }
    }

    /// Uniform sample from the box.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.lb
            .iter()
            .zip(&self.ub)
            .map(|(l, u)| rng.gen_range(*l..*u))
            .collect()
    }

    /// The single-objective problem `f_j` over the same box.
    pub fn restrict(&self, j: usize) -> Result<BoxProblem> {
        if j >= self.m {
            return Err(Error::ContractViolation(format!(
                "objective index {j} out of range for m = {}",
                self.m
            )));
        }
        let inner = Arc::clone(&self.objectives);
        let single = Restricted { inner, j };
        BoxProblem::new(
            format!("{}[f{}]", self.name, j + 1),
            self.lb.clone(),
            self.ub.clone(),
            1,
            single,
        )
    }
}

struct Restricted {
    inner: Arc<dyn Objectives>,
    j: usize,
}

impl Objectives for Restricted {
    fn eval(&self, z: &[f64]) -> Vec<f64> {
        vec![self.inner.eval(z)[self.j]]
    }

    fn jacobian(&self, z: &[f64]) -> Vec<Vec<f64>> {
        let mut jac = self.inner.jacobian(z);
        vec![jac.swap_remove(self.j)]
    }
}

/// Per-run evaluation counter wrapping a problem.
///
/// One objective-vector call counts as one function evaluation; Jacobian calls
/// are counted separately.
pub struct Evaluator<'p> {
    problem: &'p BoxProblem,
    f_evals: Cell<u64>,
    jac_evals: Cell<u64>,
}

impl<'p> Evaluator<'p> {
    pub fn new(problem: &'p BoxProblem) -> Self {
        Self {
            problem,
            f_evals: Cell::new(0),
            jac_evals: Cell::new(0),
        }
    }

    pub fn problem(&self) -> &'p BoxProblem {
        self.problem
    }

    pub fn eval(&self, z: &[f64]) -> Vec<f64> {
        self.f_evals.set(self.f_evals.get() + 1);
        self.problem.eval(z)
    }

    pub fn jacobian(&self, z: &[f64]) -> Vec<Vec<f64>> {
        self.jac_evals.set(self.jac_evals.get() + 1);
        self.problem.jacobian(z)
    }

    pub fn f_evals(&self) -> u64 {
        self.f_evals.get()
    }

    pub fn jac_evals(&self) -> u64 {
        self.jac_evals.get()
    }
}

/// Geometric constants of a problem: box diameter `K`, gradient bound `M` and
/// Lipschitz estimate `L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsInfo {
    pub diameter: f64,
    pub gradient_bound: f64,
    pub lipschitz: f64,
}

const GRADIENT_INFLATION: f64 = 1.2;
const GRADIENT_FLOOR: f64 = 1e-8;

/// Estimates [`BoundsInfo`] from `sample_count` uniform interior samples.
///
/// `M` is the largest sampled objective-gradient norm inflated by 1.2 and
/// floored at 1e-8; the sampled bound doubles as the Lipschitz estimate.
pub fn estimate_bounds(problem: &BoxProblem, sample_count: usize, seed: u64) -> Result<BoundsInfo> {
    if sample_count == 0 {
        return Err(Error::ContractViolation(
            "estimate_bounds needs sample_count >= 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_norm: f64 = 0.0;
    for _ in 0..sample_count {
        let z = problem.sample_uniform(&mut rng);
        for (j, g) in problem.jacobian(&z).iter().enumerate() {
            let gn = norm(g);
            if !gn.is_finite() {
                return Err(Error::ProblemDefinition(format!(
                    "{}: non-finite gradient of objective {j} at {z:?}",
                    problem.name()
                )));
            }
            max_norm = max_norm.max(gn);
        }
    }
    let gradient_bound = (GRADIENT_INFLATION * max_norm).max(GRADIENT_FLOOR);
    Ok(BoundsInfo {
        diameter: problem.diameter(),
        gradient_bound,
        lipschitz: gradient_bound,
    })
}

/// Central finite-difference Jacobian with step `1e-6 * (1 + |z_i|)`.
pub fn finite_difference_jacobian(problem: &BoxProblem, z: &[f64]) -> Vec<Vec<f64>> {
    let n = z.len();
    let mut jac = vec![vec![0.0; n]; problem.m()];
    let mut zp = z.to_vec();
    for i in 0..n {
        let h = 1e-6 * (1.0 + z[i].abs());
        zp[i] = z[i] + h;
        let fp = problem.eval(&zp);
        zp[i] = z[i] - h;
        let fm = problem.eval(&zp);
        zp[i] = z[i];
        for j in 0..problem.m() {
            jac[j][i] = (fp[j] - fm[j]) / (2.0 * h);
        }
    }
    jac
}

/// Largest entrywise mixed relative error `|a - b| / max(1, |a|, |b|)` between
/// the analytic and the finite-difference Jacobian at `z`.
pub fn jacobian_error(problem: &BoxProblem, z: &[f64]) -> f64 {
    let analytic = problem.jacobian(z);
    let numeric = finite_difference_jacobian(problem, z);
    analytic
        .iter()
        .flatten()
        .zip(numeric.iter().flatten())
        .map(|(a, b)| (a - b).abs() / 1f64.max(a.abs()).max(b.abs()))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad_pair(lb: f64, ub: f64) -> BoxProblem {
        BoxProblem::new(
            "pair",
            vec![lb],
            vec![ub],
            2,
            FnObjectives {
                f: |z: &[f64]| vec![z[0] * z[0], (z[0] - 1.0) * (z[0] - 1.0)],
                jac: |z: &[f64]| vec![vec![2.0 * z[0]], vec![2.0 * (z[0] - 1.0)]],
            },
        )
        .unwrap()
    }

    #[test]
    fn rejects_degenerate_boxes() {
        let f = FnObjectives {
            f: |_: &[f64]| vec![0.0],
            jac: |_: &[f64]| vec![vec![0.0]],
        };
        assert!(BoxProblem::new("bad", vec![1.0], vec![1.0], 1, f).is_err());
    }

    #[test]
    fn diameter_of_unit_hypercube() {
        let f = FnObjectives {
            f: |_: &[f64]| vec![0.0],
            jac: |_: &[f64]| vec![vec![0.0; 4]],
        };
        let p = BoxProblem::new("cube", vec![0.0; 4], vec![1.0; 4], 1, f).unwrap();
        let b = estimate_bounds(&p, 10, 1).unwrap();
        assert_eq!(b.diameter, 2.0);
        // constant objective: floored
        assert_eq!(b.gradient_bound, 1e-8);
        assert_eq!(b.lipschitz, b.gradient_bound);
    }

    #[test]
    fn gradient_bound_of_quadratic_pair() {
        let p = quad_pair(0.0, 2.0);
        let b = estimate_bounds(&p, 2000, 3).unwrap();
        // sup |2z| on [0, 2] is 4; the estimate is 1.2 * sampled max
        assert!(b.gradient_bound <= 1.2 * 4.0 + 1e-12);
        assert!(b.gradient_bound >= 1.2 * 3.99);
        assert_eq!(b, estimate_bounds(&p, 2000, 3).unwrap());
    }

    #[test]
    fn non_finite_gradient_is_a_definition_error() {
        let f = FnObjectives {
            f: |_: &[f64]| vec![0.0],
            jac: |_: &[f64]| vec![vec![f64::NAN]],
        };
        let p = BoxProblem::new("nan", vec![0.0], vec![1.0], 1, f).unwrap();
        assert!(matches!(
            estimate_bounds(&p, 1, 0),
            Err(Error::ProblemDefinition(_))
        ));
    }

    #[test]
    fn restriction_keeps_one_objective() {
        let p = quad_pair(-2.0, 2.0);
        let r = p.restrict(1).unwrap();
        assert_eq!(r.m(), 1);
        assert_eq!(r.eval(&[3.0]), vec![4.0]);
        assert_eq!(r.jacobian(&[3.0]), vec![vec![4.0]]);
        assert!(p.restrict(2).is_err());
    }

    #[test]
    fn evaluator_counts_calls() {
        let p = quad_pair(-2.0, 2.0);
        let ev = Evaluator::new(&p);
        ev.eval(&[0.5]);
        ev.eval(&[0.5]);
        ev.jacobian(&[0.5]);
        assert_eq!((ev.f_evals(), ev.jac_evals()), (2, 1));
    }
}
