//! Benchmark problem registry.

mod appendix;
mod classic;
mod dtlz;
mod synthetic;
mod zdt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::problem::BoxProblem;

pub use synthetic::{GLOBAL_PLATEAU, LOCAL_PLATEAU};

/// A registered problem with metadata.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub problem: BoxProblem,
    /// Several local fronts are present.
    pub multimodal: bool,
    /// Short family tag: "ackley-levy", "zdt", "dtlz", "classic" or "synthetic".
    pub family: &'static str,
}

impl ProblemSpec {
    pub fn name(&self) -> &str {
        self.problem.name()
    }

    /// `(m, n)`.
    pub fn signature(&self) -> (usize, usize) {
        (self.problem.m(), self.problem.n())
    }

    pub fn info(&self) -> ProblemInfo {
        ProblemInfo {
            name: self.name().to_string(),
            m: self.problem.m(),
            n: self.problem.n(),
            multimodal: self.multimodal,
            family: self.family.to_string(),
            known_front: self.problem.has_front(),
        }
    }
}

/// Serializable summary of a [`ProblemSpec`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProblemInfo {
    pub name: String,
    pub m: usize,
    pub n: usize,
    pub multimodal: bool,
    pub family: String,
    pub known_front: bool,
}

fn spec(problem: Result<BoxProblem>, multimodal: bool, family: &'static str) -> ProblemSpec {
    ProblemSpec {
        problem: problem.expect("built-in problem definitions are valid"),
        multimodal,
        family,
    }
}

fn boxed(n: usize, lb: f64, ub: f64) -> (Vec<f64>, Vec<f64>) {
    (vec![lb; n], vec![ub; n])
}

fn pair(name: &str, n: usize, lb: f64, ub: f64, objectives: appendix::Pair) -> ProblemSpec {
    let (l, u) = boxed(n, lb, ub);
    spec(
        BoxProblem::new(name, l, u, 2, objectives),
        true,
        "ackley-levy",
    )
}

fn zdt(name: &str, kind: zdt::Zdt) -> ProblemSpec {
    let (l, u) = boxed(30, 0.0, 1.0);
    spec(
        BoxProblem::new(name, l, u, 2, kind).map(|p| p.with_front(move |c| zdt::front(kind, c))),
        false,
        "zdt",
    )
}

fn dtlz(name: &str, kind: dtlz::Dtlz, m: usize, n: usize) -> ProblemSpec {
    let (l, u) = boxed(n, 0.0, 1.0);
    let p = BoxProblem::new(name, l, u, m, dtlz::DtlzProblem { kind, m })
        .map(|p| p.with_front(move |c| dtlz::front(kind, m, c)));
    spec(p, kind != dtlz::Dtlz::Two, "dtlz")
}

/// Every built-in problem, in a fixed order.
pub fn registry() -> Vec<ProblemSpec> {
    use appendix::{ackley, levy, levy_scaled, rastrigin, styblinski_tang, Pair};
    let (l1, u1) = boxed(1, 0.0, 3.0);
    let (l5, u5) = boxed(5, -2.0, 2.0);
    let (l4, u4) = boxed(4, -4.0, 4.0);
    let (ls, us) = boxed(1, -2.0, 2.0);
    vec![
        pair("AL1", 20, -0.5, 1.5, Pair(ackley, levy)),
        pair("AL2", 50, -0.5, 1.5, Pair(ackley, levy_scaled)),
        pair("LP1", 50, -3.0, 2.0, Pair(levy, styblinski_tang)),
        pair("LR1", 50, -2.0, 2.0, Pair(levy, rastrigin)),
        zdt("ZDT1", zdt::Zdt::One),
        zdt("ZDT2", zdt::Zdt::Two),
        zdt("ZDT3", zdt::Zdt::Three),
        dtlz("DTLZ1", dtlz::Dtlz::One, 3, 7),
        dtlz("DTLZ2", dtlz::Dtlz::Two, 3, 12),
        dtlz("DTLZ1n2", dtlz::Dtlz::One, 2, 2),
        dtlz("DTLZ2n2", dtlz::Dtlz::Two, 2, 2),
        dtlz("DTLZ3n2", dtlz::Dtlz::Three, 2, 2),
        spec(
            BoxProblem::new("MOP2", l4, u4, 2, classic::FonsecaFleming)
                .map(|p| p.with_front(|c| classic::fonseca_front(4, c))),
            false,
            "classic",
        ),
        spec(
            BoxProblem::new("SCH", ls, us, 2, classic::ConvexPair)
                .map(|p| p.with_front(|c| classic::convex_front(1, c))),
            false,
            "classic",
        ),
        spec(
            BoxProblem::new("CVX5", l5, u5, 2, classic::ConvexPair)
                .map(|p| p.with_front(|c| classic::convex_front(5, c))),
            false,
            "classic",
        ),
        spec(
            BoxProblem::new("GDTEST1", l1, u1, 2, synthetic::Escape1)
                .map(|p| p.with_front(synthetic::front1)),
            true,
            "synthetic",
        ),
        spec(
            BoxProblem::new(
                "GDTEST2",
                vec![0.0, 0.0],
                vec![3.0, 1.0],
                2,
                synthetic::Escape2,
            )
            .map(|p| p.with_front(synthetic::front2)),
            true,
            "synthetic",
        ),
    ]
}

/// Names of every built-in problem, in registry order.
pub fn names() -> Vec<String> {
    registry().iter().map(|s| s.name().to_string()).collect()
}

/// Looks up a problem by name (ASCII case-insensitive).
pub fn get(name: &str) -> Result<ProblemSpec> {
    registry()
        .into_iter()
        .find(|s| s.name().eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::NotFound(format!("problem '{name}'")))
}

/// `count` points of the analytic front, when one is known.
pub fn true_front_sample(spec: &ProblemSpec, count: usize) -> Option<Vec<Vec<f64>>> {
    spec.problem.front_sample(count)
}
