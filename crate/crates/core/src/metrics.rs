//! Quality indicators: nondominated filtering, hypervolume, spread and
//! performance profiles.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pareto::dominates_unchecked;

/// Indices of the nondominated points, in input order. Equal points are all
/// kept.
pub fn pareto_filter(points: &[Vec<f64>]) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| !points.iter().any(|q| dominates_unchecked(q, &points[i])))
        .collect()
}

fn check_dims(front: &[Vec<f64>], m: usize) -> Result<()> {
    for p in front {
        if p.len() != m {
            return Err(Error::ContractViolation(format!(
                "point of length {} against {m} objectives",
                p.len()
            )));
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::ContractViolation(format!(
                "non-finite objective vector {p:?}"
            )));
        }
    }
    Ok(())
}

/// Area dominated by `pts` (already strictly inside the reference) up to
/// `(r0, r1)`.
fn area_2d(pts: &mut [[f64; 2]], r0: f64, r1: f64) -> f64 {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut level = r1;
    let mut area = 0.0;
    for p in pts.iter() {
        if p[1] < level {
            area += (r0 - p[0]) * (level - p[1]);
            level = p[1];
        }
    }
    area
}

/// Hypervolume of `front` with respect to `reference` for two or three
/// objectives.
///
/// Points that are not below `reference` in every coordinate are dropped;
/// the second value is how many were.
pub fn hypervolume(front: &[Vec<f64>], reference: &[f64]) -> Result<(f64, usize)> {
    let m = reference.len();
    if !(2..=3).contains(&m) {
        return Err(Error::Unsupported(format!(
            "hypervolume for {m} objectives"
        )));
    }
    check_dims(front, m)?;
    let inside: Vec<&Vec<f64>> = front
        .iter()
        .filter(|p| p.iter().zip(reference).all(|(a, r)| a <= r))
        .collect();
    let discarded = front.len() - inside.len();
    if discarded > 0 {
        log::warn!("hypervolume: {discarded} point(s) beyond the reference point discarded");
    }
    if m == 2 {
        let mut pts: Vec<[f64; 2]> = inside.iter().map(|p| [p[0], p[1]]).collect();
        return Ok((area_2d(&mut pts, reference[0], reference[1]), discarded));
    }
    let mut sorted = inside;
    sorted.sort_by(|a, b| a[2].total_cmp(&b[2]));
    let mut volume = 0.0;
    let mut slice: Vec<[f64; 2]> = Vec::with_capacity(sorted.len());
    for (k, p) in sorted.iter().enumerate() {
        slice.push([p[0], p[1]]);
        let top = sorted.get(k + 1).map_or(reference[2], |q| q[2]);
        if top > p[2] {
            volume += area_2d(&mut slice, reference[0], reference[1]) * (top - p[2]);
        }
    }
    Ok((volume, discarded))
}

/// Shared reference point `f_max + 0.1 (f_max - f_min)` over the union of
/// `fronts`.
pub fn reference_point(fronts: &[&[Vec<f64>]]) -> Result<Vec<f64>> {
    let mut union = fronts.iter().flat_map(|f| f.iter());
    let first = union
        .next()
        .ok_or_else(|| Error::Undefined("reference point of no points".into()))?;
    let mut lo = first.clone();
    let mut hi = first.clone();
    for p in union {
        if p.len() != lo.len() {
            return Err(Error::ContractViolation(
                "fronts differ in objective count".into(),
            ));
        }
        for i in 0..p.len() {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    Ok(hi.iter().zip(&lo).map(|(h, l)| h + 0.1 * (h - l)).collect())
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Endpoints of a bi-objective front: the point with the smallest `f1`
/// and the point with the smallest `f2` (ties broken by the other objective).
pub fn extremes(points: &[Vec<f64>]) -> Option<[Vec<f64>; 2]> {
    let by = |i: usize, k: usize| {
        move |a: &&Vec<f64>, b: &&Vec<f64>| a[i].total_cmp(&b[i]).then(a[k].total_cmp(&b[k]))
    };
    let first = points.iter().min_by(by(0, 1))?;
    let last = points.iter().min_by(by(1, 0))?;
    Some([first.clone(), last.clone()])
}

/// Bi-objective spread
/// `(d_f + d_l + sum |d_i - mean d|) / (d_f + d_l + (N - 1) mean d)`
/// over consecutive gaps of the front sorted by `f1`. A single point scores 1.
pub fn delta_spread(front: &[Vec<f64>], extremes: &[Vec<f64>; 2]) -> Result<f64> {
    if front.is_empty() {
        return Err(Error::Undefined("spread of an empty front".into()));
    }
    check_dims(front, 2)?;
    if extremes.iter().any(|e| e.len() != 2) {
        return Err(Error::ContractViolation(
            "spread needs two objectives".into(),
        ));
    }
    if front.len() == 1 {
        return Ok(1.0);
    }
    let mut pts: Vec<&Vec<f64>> = front.iter().collect();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(b[1].total_cmp(&a[1])));
    let gaps: Vec<f64> = pts.windows(2).map(|w| euclid(w[0], w[1])).collect();
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    let d_f = euclid(&extremes[0], pts[0]);
    let d_l = euclid(&extremes[1], pts[pts.len() - 1]);
    let numerator = d_f + d_l + gaps.iter().map(|d| (d - mean).abs()).sum::<f64>();
    let denominator = d_f + d_l + gaps.len() as f64 * mean;
    if denominator == 0.0 {
        return Ok(0.0);
    }
    Ok(numerator / denominator)
}

/// Spread substitute for any number of objectives: the mean absolute
/// deviation of nearest-neighbour distances divided by their mean. A single
/// point scores 1.
pub fn nn_gap_deviation(front: &[Vec<f64>]) -> Result<f64> {
    if front.is_empty() {
        return Err(Error::Undefined("spread of an empty front".into()));
    }
    if front.len() == 1 {
        return Ok(1.0);
    }
    let nn: Vec<f64> = (0..front.len())
        .map(|i| {
            (0..front.len())
                .filter(|&k| k != i)
                .map(|k| euclid(&front[i], &front[k]))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let mean = nn.iter().sum::<f64>() / nn.len() as f64;
    if mean == 0.0 {
        return Ok(0.0);
    }
    Ok(nn.iter().map(|d| (d - mean).abs()).sum::<f64>() / (nn.len() as f64 * mean))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpreadKind {
    /// [`delta_spread`], two objectives.
    Delta,
    /// [`nn_gap_deviation`], three objectives.
    NearestNeighbour,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub hypervolume: f64,
    pub reference: Vec<f64>,
    /// Points beyond the reference point.
    pub discarded: usize,
    pub delta_spread: f64,
    pub spread_kind: SpreadKind,
    pub n_nondominated: usize,
    pub f_evals: u64,
    pub jac_evals: u64,
}

impl MetricReport {
    /// Metrics of the nondominated part of `points`. `extremes` are the
    /// endpoints used by the bi-objective spread; the front's own endpoints
    /// are used when `None`.
    pub fn evaluate(
        points: &[Vec<f64>],
        reference: &[f64],
        extremes_hint: Option<&[Vec<f64>; 2]>,
        f_evals: u64,
        jac_evals: u64,
    ) -> Result<Self> {
        let front: Vec<Vec<f64>> = pareto_filter(points)
            .into_iter()
            .map(|i| points[i].clone())
            .collect();
        let (hv, discarded) = hypervolume(&front, reference)?;
        let (delta_spread, spread_kind) = if reference.len() == 2 {
            let own = extremes(&front)
                .ok_or_else(|| Error::Undefined("spread of an empty front".into()))?;
            (
                delta_spread(&front, extremes_hint.unwrap_or(&own))?,
                SpreadKind::Delta,
            )
        } else {
            (nn_gap_deviation(&front)?, SpreadKind::NearestNeighbour)
        };
        Ok(Self {
            hypervolume: hv,
            reference: reference.to_vec(),
            discarded,
            delta_spread,
            spread_kind,
            n_nondominated: front.len(),
            f_evals,
            jac_evals,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileCurve {
    pub solver: String,
    /// Performance ratios over the retained problems, ascending; failures are
    /// infinite.
    pub ratios: Vec<f64>,
    pub taus: Vec<f64>,
    /// Fraction of problems with ratio `<= taus[k]`.
    pub values: Vec<f64>,
}

impl ProfileCurve {
    /// Value of the step function at `tau`.
    pub fn at(&self, tau: f64) -> f64 {
        if self.ratios.is_empty() {
            return 0.0;
        }
        self.ratios.iter().filter(|&&r| r <= tau).count() as f64 / self.ratios.len() as f64
    }
}

/// Turns a benefit table (larger is better, e.g. hypervolume) into costs
/// `best_p / benefit_sp` for [`performance_profile`]. Nonpositive or missing
/// benefits become failures.
pub fn benefit_to_cost(benefits: &[Vec<Option<f64>>]) -> Vec<Vec<Option<f64>>> {
    let problems = benefits.first().map_or(0, Vec::len);
    let best: Vec<f64> = (0..problems)
        .map(|p| {
            benefits
                .iter()
                .filter_map(|row| row.get(p).copied().flatten())
                .fold(0.0, f64::max)
        })
        .collect();
    benefits
        .iter()
        .map(|row| {
            row.iter()
                .zip(&best)
                .map(|(b, &top)| b.filter(|&v| v > 0.0 && v.is_finite()).map(|v| top / v))
                .collect()
        })
        .collect()
}

/// Performance profiles from `costs[s][p]` (`None` marks a failure).
///
/// Problems on which every solver failed are dropped. The tau grid is the
/// ascending set of distinct finite ratios, shared by all curves.
pub fn performance_profile(
    solvers: &[String],
    costs: &[Vec<Option<f64>>],
) -> Result<Vec<ProfileCurve>> {
    if solvers.len() != costs.len() {
        return Err(Error::ContractViolation("one cost row per solver".into()));
    }
    let problems = costs.first().map_or(0, Vec::len);
    if costs.iter().any(|row| row.len() != problems) {
        return Err(Error::ContractViolation(
            "cost rows differ in length".into(),
        ));
    }
    for c in costs.iter().flatten().flatten() {
        if !(*c > 0.0 && c.is_finite()) {
            return Err(Error::ContractViolation(format!(
                "cost {c} must be positive and finite"
            )));
        }
    }
    let mut ratios = vec![Vec::new(); solvers.len()];
    for p in 0..problems {
        let best = costs
            .iter()
            .filter_map(|row| row[p])
            .fold(f64::INFINITY, f64::min);
        if !best.is_finite() {
            log::warn!("performance profile: every solver failed on problem {p}; excluded");
            continue;
        }
        for (s, row) in costs.iter().enumerate() {
            ratios[s].push(row[p].map_or(f64::INFINITY, |c| c / best));
        }
    }
    let mut taus: Vec<f64> = ratios
        .iter()
        .flatten()
        .copied()
        .filter(|r| r.is_finite())
        .collect();
    taus.sort_by(f64::total_cmp);
    taus.dedup();
    Ok(solvers
        .iter()
        .zip(ratios)
        .map(|(name, mut r)| {
            r.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
            let mut curve = ProfileCurve {
                solver: name.clone(),
                ratios: r,
                taus: taus.clone(),
                values: Vec::new(),
            };
            curve.values = taus.iter().map(|&t| curve.at(t)).collect();
            curve
        })
        .collect())
}
