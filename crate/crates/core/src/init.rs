//! Start generation: uniform sampling, spread filtering and the payoff table.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::global::mogdm_run;
use crate::params::SolverParams;
use crate::problem::{estimate_bounds, BoxProblem, Evaluator};

/// Normalization divisors are floored at this value.
pub const NORMALIZATION_FLOOR: f64 = 1e-12;

/// Stream ids keep the generators of different stages independent.
pub(crate) mod streams {
    pub const STARTS: u64 = 1;
    pub const RUNS: u64 = 2;
    pub const PAYOFF: u64 = 3;
    pub const BOUNDS: u64 = 4;
}

/// Generator for stage `stream` of a run seeded with `seed`.
pub fn stage_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Starts and objective-space scaling for a front construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitPlan {
    pub starts: Vec<Vec<f64>>,
    pub ideal: Vec<f64>,
    pub nadir: Vec<f64>,
    pub seed: u64,
    pub f_evals: u64,
    pub jac_evals: u64,
}

impl InitPlan {
    /// `ideal - margin (nadir - ideal)`, pushed down by a relative `1e-9` so
    /// that it stays strictly below the ideal when the range is degenerate.
    pub fn utopia(&self, margin: f64) -> Vec<f64> {
        self.ideal
            .iter()
            .zip(&self.nadir)
            .map(|(i, n)| i - margin * (n - i) - 1e-9 * (1.0 + i.abs()))
            .collect()
    }
}

/// `count` uniform samples from the box.
pub fn sample_starts(problem: &BoxProblem, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = stage_rng(seed, streams::STARTS);
    (0..count)
        .map(|_| problem.sample_uniform(&mut rng))
        .collect()
}

/// Indices of `keep` starts chosen by greedy max-min distance in objective
/// space normalized by `nadir - ideal`, seeded with the per-objective
/// minimizers. Ties go to the lowest index. The result is sorted.
pub fn spread_select(
    f_values: &[Vec<f64>],
    ideal: &[f64],
    nadir: &[f64],
    keep: usize,
) -> Result<Vec<usize>> {
    let total = f_values.len();
    if keep > total {
        return Err(Error::ContractViolation(format!(
            "cannot keep {keep} of {total} starts"
        )));
    }
    if keep == total {
        return Ok((0..total).collect());
    }
    let scale: Vec<f64> = ideal
        .iter()
        .zip(nadir)
        .map(|(i, n)| (n - i).max(NORMALIZATION_FLOOR))
        .collect();
    let normalized: Vec<Vec<f64>> = f_values
        .iter()
        .map(|f| f.iter().zip(&scale).map(|(x, s)| x / s).collect())
        .collect();
    let dist = |a: usize, b: usize| -> f64 {
        normalized[a]
            .iter()
            .zip(&normalized[b])
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    };

    let mut selected = Vec::with_capacity(keep);
    let mut taken = vec![false; total];
    for j in 0..ideal.len() {
        if selected.len() == keep {
            break;
        }
        let mut best: Option<usize> = None;
        for i in 0..total {
            if best.map_or(true, |b| f_values[i][j] < f_values[b][j]) {
                best = Some(i);
            }
        }
        if let Some(b) = best {
            if !taken[b] {
                taken[b] = true;
                selected.push(b);
            }
        }
    }
    let mut nearest = vec![f64::INFINITY; total];
    for &s in &selected {
        for i in 0..total {
            nearest[i] = nearest[i].min(dist(i, s));
        }
    }
    while selected.len() < keep {
        let mut best: Option<usize> = None;
        for i in 0..total {
            if !taken[i] && best.map_or(true, |b| nearest[i] > nearest[b]) {
                best = Some(i);
            }
        }
        let b = best.expect("keep <= total leaves a candidate");
        taken[b] = true;
        selected.push(b);
        for i in 0..total {
            nearest[i] = nearest[i].min(dist(i, b));
        }
    }
    selected.sort_unstable();
    Ok(selected)
}

/// The starts chosen by [`spread_select`], in their original order.
pub fn spread_filter(
    starts: &[Vec<f64>],
    f_values: &[Vec<f64>],
    ideal: &[f64],
    nadir: &[f64],
    keep: usize,
) -> Result<Vec<Vec<f64>>> {
    if starts.len() != f_values.len() {
        return Err(Error::ContractViolation(
            "starts and objective values differ in length".into(),
        ));
    }
    Ok(spread_select(f_values, ideal, nadir, keep)?
        .into_iter()
        .map(|i| starts[i].clone())
        .collect())
}

/// Payoff-table estimate of the ideal and nadir vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PayoffTable {
    /// Row `j` is `f` at the best minimizer found for objective `j`.
    pub rows: Vec<Vec<f64>>,
    pub minimizers: Vec<Vec<f64>>,
    pub ideal: Vec<f64>,
    pub nadir: Vec<f64>,
    pub f_evals: u64,
    pub jac_evals: u64,
}

/// Minimizes each objective alone with the global descent method from `lb`,
/// the box midpoint and `ub`, then tabulates `f` at the minimizers.
pub fn payoff_table(problem: &BoxProblem, params: &SolverParams) -> Result<PayoffTable> {
    let m = problem.m();
    let params = &SolverParams {
        utopia: None,
        ..params.clone()
    };
    let starts = [
        problem.lb().to_vec(),
        problem.midpoint(),
        problem.ub().to_vec(),
    ];
    let jobs: Vec<(usize, usize)> = (0..m)
        .flat_map(|j| (0..starts.len()).map(move |s| (j, s)))
        .collect();
    let restricted: Vec<BoxProblem> = (0..m).map(|j| problem.restrict(j)).collect::<Result<_>>()?;
    let bounds: Vec<_> = restricted
        .iter()
        .map(|p| estimate_bounds(p, params.bounds_samples, params.seed))
        .collect::<Result<_>>()?;
    let seeds = {
        use rand::Rng;
        let mut rng = stage_rng(params.seed, streams::PAYOFF);
        jobs.iter().map(|_| rng.gen::<u64>()).collect::<Vec<_>>()
    };
    let runs: Vec<(Vec<f64>, f64, u64, u64)> = jobs
        .par_iter()
        .zip(&seeds)
        .map(|(&(j, s), &seed)| {
            let ev = Evaluator::new(&restricted[j]);
            let out = mogdm_run(&ev, params, bounds[j], &starts[s], seed)?;
            let best = out.last();
            Ok((best.x.clone(), best.fx[0], ev.f_evals(), ev.jac_evals()))
        })
        .collect::<Result<_>>()?;

    let mut minimizers = Vec::with_capacity(m);
    let (mut f_evals, mut jac_evals) = (0, 0);
    for j in 0..m {
        let mut best: Option<&(Vec<f64>, f64, u64, u64)> = None;
        for (k, run) in runs.iter().enumerate() {
            if jobs[k].0 != j {
                continue;
            }
            f_evals += run.2;
            jac_evals += run.3;
            if best.map_or(true, |b| run.1 < b.1) {
                best = Some(run);
            }
        }
        minimizers.push(best.expect("three runs per objective").0.clone());
    }
    let rows: Vec<Vec<f64>> = minimizers.iter().map(|z| problem.eval(z)).collect();
    f_evals += m as u64;
    let ideal = (0..m)
        .map(|i| rows.iter().map(|r| r[i]).fold(f64::INFINITY, f64::min))
        .collect();
    let nadir = (0..m)
        .map(|i| rows.iter().map(|r| r[i]).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    Ok(PayoffTable {
        rows,
        minimizers,
        ideal,
        nadir,
        f_evals,
        jac_evals,
    })
}

/// Payoff table, then `spread_oversample * n_starts` uniform samples reduced
/// to `n_starts` by [`spread_filter`].
pub fn plan(problem: &BoxProblem, params: &SolverParams) -> Result<InitPlan> {
    params.validate()?;
    let table = payoff_table(problem, params)?;
    let pool = sample_starts(
        problem,
        params.n_starts * params.spread_oversample,
        params.seed,
    );
    let f_values: Vec<Vec<f64>> = pool.iter().map(|z| problem.eval(z)).collect();
    let starts = spread_filter(
        &pool,
        &f_values,
        &table.ideal,
        &table.nadir,
        params.n_starts,
    )?;
    Ok(InitPlan {
        starts,
        ideal: table.ideal,
        nadir: table.nadir,
        seed: params.seed,
        f_evals: table.f_evals + pool.len() as u64,
        jac_evals: table.jac_evals,
    })
}
