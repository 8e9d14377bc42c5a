//! File formats: summary and front CSVs, JSON reports, `.dat` plot data.
//!
//! Floats are written as `{:.16e}` (17 significant digits), which round-trips
//! exactly. Missing values are empty fields.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context};
use mogdm::front::Solver;
use mogdm::ParetoArchive;
use serde::Serialize;

/// Column order of the summary CSV.
pub const SUMMARY_COLUMNS: [&str; 9] = [
    "problem",
    "m",
    "n",
    "solver",
    "n_nondominated",
    "hypervolume",
    "delta",
    "f_evals",
    "wall_time",
];

/// One `(problem, solver)` line of the summary. A failed run has no metrics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub problem: String,
    pub m: usize,
    pub n: usize,
    pub solver: String,
    pub n_nondominated: Option<usize>,
    pub hypervolume: Option<f64>,
    pub delta: Option<f64>,
    pub f_evals: Option<u64>,
    pub wall_time: Option<f64>,
}

pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map(f).unwrap_or_default()
}

pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> anyhow::Result<()> {
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(SUMMARY_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.problem.clone(),
            r.m.to_string(),
            r.n.to_string(),
            r.solver.clone(),
            opt(r.n_nondominated, |v| v.to_string()),
            opt(r.hypervolume, fmt_float),
            opt(r.delta, fmt_float),
            opt(r.f_evals, |v| v.to_string()),
            opt(r.wall_time, fmt_float),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn parse_opt<T: std::str::FromStr>(field: &str, column: &str) -> anyhow::Result<Option<T>>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    if field.is_empty() {
        return Ok(None);
    }
    Ok(Some(
        field
            .parse()
            .with_context(|| format!("column {column}: '{field}'"))?,
    ))
}

pub fn read_summary(path: &Path) -> anyhow::Result<Vec<SummaryRow>> {
    let mut r =
        csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != SUMMARY_COLUMNS {
        bail!("{}: unexpected columns {header:?}", path.display());
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        rows.push(SummaryRow {
            problem: field(0).to_string(),
            m: field(1).parse().context("column m")?,
            n: field(2).parse().context("column n")?,
            solver: field(3).to_string(),
            n_nondominated: parse_opt(field(4), SUMMARY_COLUMNS[4])?,
            hypervolume: parse_opt(field(5), SUMMARY_COLUMNS[5])?,
            delta: parse_opt(field(6), SUMMARY_COLUMNS[6])?,
            f_evals: parse_opt(field(7), SUMMARY_COLUMNS[7])?,
            wall_time: parse_opt(field(8), SUMMARY_COLUMNS[8])?,
        });
    }
    Ok(rows)
}

/// Nondominated points of every solver on one problem: `solver, problem,
/// z1..zn, f1..fm`.
pub fn write_fronts(
    path: &Path,
    problem: &str,
    n: usize,
    m: usize,
    fronts: &[(Solver, &ParetoArchive)],
) -> anyhow::Result<()> {
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    let mut header = vec!["solver".to_string(), "problem".to_string()];
    header.extend((1..=n).map(|i| format!("z{i}")));
    header.extend((1..=m).map(|j| format!("f{j}")));
    w.write_record(&header)?;
    for (solver, archive) in fronts {
        for e in archive.entries() {
            let mut rec = vec![solver.label().to_string(), problem.to_string()];
            rec.extend(e.z.iter().chain(&e.f).map(|&x| fmt_float(x)));
            w.write_record(&rec)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads the objective columns of a fronts CSV, grouped by solver label.
pub fn read_front_objectives(path: &Path) -> anyhow::Result<Vec<(String, Vec<f64>)>> {
    let mut r =
        csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let f_cols: Vec<usize> = header
        .iter()
        .enumerate()
        .filter(|(_, h)| h.starts_with('f'))
        .map(|(i, _)| i)
        .collect();
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let f = f_cols
            .iter()
            .map(|&i| rec[i].parse::<f64>())
            .collect::<Result<Vec<_>, _>>()?;
        out.push((rec[0].to_string(), f));
    }
    Ok(out)
}

/// Whitespace-separated objective vectors, one per line, after a comment
/// header.
pub fn write_points_dat(path: &Path, title: &str, points: &[Vec<f64>]) -> anyhow::Result<()> {
    let mut w =
        BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    let m = points.first().map_or(0, Vec::len);
    writeln!(w, "# {title}")?;
    writeln!(
        w,
        "# {}",
        (1..=m)
            .map(|j| format!("f{j}"))
            .collect::<Vec<_>>()
            .join(" ")
    )?;
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    for p in &sorted {
        writeln!(
            w,
            "{}",
            p.iter()
                .map(|&x| fmt_float(x))
                .collect::<Vec<_>>()
                .join(" ")
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn ensure_dir(path: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(path).with_context(|| format!("creating {}", path.display()))
}

/// File-name-safe version of a label.
pub fn slug(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(solver: &str, hv: Option<f64>) -> SummaryRow {
        SummaryRow {
            problem: "SCH".into(),
            m: 2,
            n: 1,
            solver: solver.into(),
            n_nondominated: hv.map(|_| 3),
            hypervolume: hv,
            delta: hv.map(|_| 0.1),
            f_evals: hv.map(|_| 42),
            wall_time: None,
        }
    }

    #[test]
    fn summary_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let rows = vec![row("mogdm", Some(1.0 / 3.0)), row("local-only", None)];
        write_summary(&path, &rows).unwrap();
        assert_eq!(read_summary(&path).unwrap(), rows);
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with(
            "problem,m,n,solver,n_nondominated,hypervolume,delta,f_evals,wall_time\n"
        ));
        assert!(text.contains("3.3333333333333331e-1"));
    }

    #[test]
    fn fronts_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        let mut a = ParetoArchive::filtered();
        a.insert(vec![0.5], vec![0.25, 0.25]);
        a.insert(vec![0.0], vec![0.0, 1.0]);
        write_fronts(&path, "SCH", 1, 2, &[(Solver::Mogdm, &a)]).unwrap();
        let back = read_front_objectives(&path).unwrap();
        assert_eq!(
            back,
            vec![
                ("mogdm".to_string(), vec![0.25, 0.25]),
                ("mogdm".to_string(), vec![0.0, 1.0])
            ]
        );
    }

    #[test]
    fn slugs_are_file_safe() {
        assert_eq!(slug("a b/c:d"), "a_b_c_d");
    }
}
