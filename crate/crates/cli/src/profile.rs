//! The `profile` command: performance profiles from summary CSVs.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context};
use mogdm::metrics::{benefit_to_cost, performance_profile, ProfileCurve};

use crate::output::{fmt_float, read_summary, SummaryRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Hypervolume, a benefit: inverted to `best / hv`.
    Hv,
    Delta,
    /// Objective-vector evaluations.
    Fevals,
}

impl FromStr for Metric {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        match s {
            "hv" | "hypervolume" => Ok(Metric::Hv),
            "delta" => Ok(Metric::Delta),
            "fevals" | "f_evals" => Ok(Metric::Fevals),
            _ => bail!("unknown metric '{s}' (expected hv, delta or fevals)"),
        }
    }
}

impl Metric {
    pub fn label(self) -> &'static str {
        match self {
            Metric::Hv => "hv",
            Metric::Delta => "delta",
            Metric::Fevals => "fevals",
        }
    }

    fn value(self, row: &SummaryRow) -> Option<f64> {
        match self {
            Metric::Hv => row.hypervolume,
            // a perfect spread of 0 stays a valid (smallest) cost
            Metric::Delta => row.delta.map(|d| d.max(f64::MIN_POSITIVE)),
            Metric::Fevals => row.f_evals.map(|v| v as f64),
        }
    }
}

/// Solver series of the profile: the solver column of one file, or
/// `file:solver` when several files are compared.
pub fn cost_table(
    files: &[(String, Vec<SummaryRow>)],
    metric: Metric,
) -> anyhow::Result<(Vec<String>, Vec<String>, Vec<Vec<Option<f64>>>)> {
    let mut series: Vec<(String, &SummaryRow)> = Vec::new();
    for (label, rows) in files {
        for r in rows {
            let name = if files.len() > 1 {
                format!("{label}:{}", r.solver)
            } else {
                r.solver.clone()
            };
            series.push((name, r));
        }
    }
    let solvers: Vec<String> = {
        let mut seen = Vec::new();
        for (s, _) in &series {
            if !seen.contains(s) {
                seen.push(s.clone());
            }
        }
        seen
    };
    let problems: Vec<String> = series
        .iter()
        .map(|(_, r)| r.problem.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if solvers.len() < 2 {
        bail!("a profile needs at least two solvers, found {solvers:?}");
    }
    let shared = problems
        .iter()
        .any(|p| series.iter().filter(|(_, r)| &r.problem == p).count() >= 2);
    if !shared {
        bail!("the solvers share no problem");
    }
    let mut values = vec![vec![None; problems.len()]; solvers.len()];
    for (s, r) in &series {
        let si = solvers.iter().position(|x| x == s).expect("listed");
        let pi = problems
            .iter()
            .position(|x| x == &r.problem)
            .expect("listed");
        if values[si][pi].is_some() {
            bail!("duplicate row for {s} on {}", r.problem);
        }
        values[si][pi] = metric.value(r);
    }
    let costs = if metric == Metric::Hv {
        benefit_to_cost(&values)
    } else {
        values
    };
    Ok((solvers, problems, costs))
}

pub fn profile_files(paths: &[PathBuf], metric: Metric) -> anyhow::Result<Vec<ProfileCurve>> {
    let files = paths
        .iter()
        .map(|p| {
            let label = p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| p.display().to_string());
            Ok((label, read_summary(p)?))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let (solvers, _, costs) = cost_table(&files, metric)?;
    Ok(performance_profile(&solvers, &costs)?)
}

/// `solver,tau,rho` rows on the shared tau grid.
pub fn write_profile_csv(path: &Path, curves: &[ProfileCurve]) -> anyhow::Result<()> {
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(["solver", "tau", "rho"])?;
    for c in curves {
        for (t, v) in c.taus.iter().zip(&c.values) {
            w.write_record([c.solver.clone(), fmt_float(*t), fmt_float(*v)])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// One gnuplot data block per solver (`plot 'f.dat' index i with steps`).
pub fn write_profile_dat(
    path: &Path,
    curves: &[ProfileCurve],
    metric: Metric,
) -> anyhow::Result<()> {
    let mut w =
        BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    writeln!(w, "# performance profile, metric {}", metric.label())?;
    for (i, c) in curves.iter().enumerate() {
        if i > 0 {
            writeln!(w, "\n")?;
        }
        writeln!(w, "# {}", c.solver)?;
        writeln!(w, "# tau rho")?;
        for (t, v) in c.taus.iter().zip(&c.values) {
            writeln!(w, "{} {}", fmt_float(*t), fmt_float(*v))?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(problem: &str, solver: &str, hv: f64, fevals: u64) -> SummaryRow {
        SummaryRow {
            problem: problem.into(),
            m: 2,
            n: 1,
            solver: solver.into(),
            n_nondominated: Some(1),
            hypervolume: Some(hv),
            delta: Some(0.0),
            f_evals: Some(fevals),
            wall_time: None,
        }
    }

    #[test]
    fn hypervolume_costs_are_inverted() {
        let rows = vec![row("A", "x", 2.0, 10), row("A", "y", 1.0, 20)];
        let (solvers, problems, costs) = cost_table(&[("s".into(), rows)], Metric::Hv).unwrap();
        assert_eq!((solvers.len(), problems.len()), (2, 1));
        assert_eq!(costs, vec![vec![Some(1.0)], vec![Some(2.0)]]);
    }

    #[test]
    fn zero_spread_is_a_valid_cost() {
        let rows = vec![row("A", "x", 2.0, 10), row("A", "y", 1.0, 20)];
        let (_, _, costs) = cost_table(&[("s".into(), rows)], Metric::Delta).unwrap();
        assert_eq!(costs[0][0], Some(f64::MIN_POSITIVE));
    }

    #[test]
    fn disjoint_or_single_solver_tables_are_rejected() {
        let disjoint = vec![row("A", "x", 1.0, 1), row("B", "y", 1.0, 1)];
        assert!(cost_table(&[("s".into(), disjoint)], Metric::Fevals).is_err());
        let single = vec![row("A", "x", 1.0, 1), row("B", "x", 1.0, 1)];
        assert!(cost_table(&[("s".into(), single)], Metric::Fevals).is_err());
    }

    #[test]
    fn metric_names_parse() {
        assert_eq!("hv".parse::<Metric>().unwrap(), Metric::Hv);
        assert_eq!("fevals".parse::<Metric>().unwrap(), Metric::Fevals);
        assert!("time".parse::<Metric>().is_err());
    }
}
