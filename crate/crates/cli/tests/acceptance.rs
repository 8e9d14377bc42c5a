//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! `cargo test -p mogdm-cli --test acceptance` runs criteria 1-8 with the
//! small-n problems; add `-- --ignored` for the n = 50 problems of criterion 6.

use std::path::Path;
use std::time::{Duration, Instant};

use mogdm::checks;
use mogdm::front::{build_plan, run_solver, RunReport, Solver};
use mogdm::metrics::{hypervolume, pareto_filter, performance_profile, reference_point};
use mogdm::pareto::strictly_better;
use mogdm::problems::{self, LOCAL_PLATEAU};
use mogdm::SolverParams;
use mogdm_cli::app::main_with_args;
use mogdm_cli::profile::{self, Metric};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 1;

// Tolerances and budgets.
const V_TOL: f64 = 1e-12;
const C1_BUDGET: Duration = Duration::from_secs(1);
const C2_BUDGET: Duration = Duration::from_secs(10);
const C3_BUDGET: Duration = Duration::from_secs(30);
const C4_BUDGET: Duration = Duration::from_secs(60);
const C5_BUDGET: Duration = Duration::from_secs(120);
const C6_BUDGET: Duration = Duration::from_secs(15 * 60);
const C6_LONG_BUDGET: Duration = Duration::from_secs(60 * 60);
const MC_SAMPLES: usize = 1_000_000;
const MC_SIGMAS: f64 = 3.0;
const ESCAPE_SHARE: f64 = 0.9;
const HV_SLACK: f64 = 1e-9;
const MULTIMODAL_FACTOR: usize = 2;
const ZDT_MEDIAN: f64 = 1e-2;
const FRONT_STARTS: usize = 200;
const ESCAPE_STARTS: usize = 100;

const MULTIMODAL_SET: [&str; 4] = ["GDTEST1", "GDTEST2", "DTLZ1n2", "DTLZ3n2"];
const LONG_SET: [&str; 3] = ["AL2", "LP1", "LR1"];

struct Verdict {
    pass: bool,
    detail: String,
}

fn report(id: &str, title: &str, elapsed: Duration, budget: Option<Duration>, v: Verdict) -> bool {
    let pass = v.pass && budget.map_or(true, |b| elapsed <= b);
    let limit = budget
        .map(|b| format!(" of {:.0} s", b.as_secs_f64()))
        .unwrap_or_default();
    println!(
        "{} criterion {id}: {title} | {} | {:.1} s{limit}",
        if pass { "PASS" } else { "FAIL" },
        v.detail,
        elapsed.as_secs_f64()
    );
    pass
}

fn criterion1() -> Verdict {
    let suites = [
        checks::v_conditions(10_000, SEED),
        checks::kernel_properties(10_000, SEED),
        checks::mu_c_prime_vanishes(),
    ];
    let v = &suites[0];
    let pass = suites.iter().all(|c| c.passed()) && v.worst < V_TOL;
    let detail = suites
        .iter()
        .map(|c| format!("{} {}/{}", c.name, c.samples - c.violations, c.samples))
        .collect::<Vec<_>>()
        .join(", ");
    Verdict {
        pass,
        detail: format!("{detail}, identity error {:.1e}", v.worst),
    }
}

fn criterion2() -> Verdict {
    let gdf = checks::gdf_gradients(200, SEED).expect("gdf suite runs");
    let jac = checks::problem_jacobians(200, SEED);
    let worst_jac = jac.iter().map(|c| c.worst).fold(0.0, f64::max);
    let bad: Vec<&str> = jac
        .iter()
        .filter(|c| !c.passed())
        .map(|c| c.name.as_str())
        .collect();
    Verdict {
        pass: gdf.passed() && bad.is_empty() && gdf.samples >= 200,
        detail: format!(
            "gdf {} points worst {:.1e} (< 1e-5), {} jacobians worst {:.1e} (< 1e-4){}",
            gdf.samples,
            gdf.worst,
            jac.len(),
            worst_jac,
            if bad.is_empty() {
                String::new()
            } else {
                format!(", failing {bad:?}")
            }
        ),
    }
}

fn criterion3() -> Verdict {
    let t = checks::descent_invariants(500, SEED).expect("descent suite runs");
    let parts = [
        &t.basin_exclusion,
        &t.radial_descent,
        &t.no_stationary_point,
    ];
    Verdict {
        pass: t.passed() && parts.iter().all(|c| c.samples == 500),
        detail: format!(
            "{}, smallest hull norm {:.2e}, {} draws rejected by the reduction loop",
            parts
                .iter()
                .map(|c| format!("{} {} violations", c.name, c.violations))
                .collect::<Vec<_>>()
                .join(", "),
            t.no_stationary_point.worst,
            t.rejected
        ),
    }
}

fn brute_nondominated(points: &[Vec<f64>]) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| {
            !points.iter().any(|q| {
                q.iter().zip(&points[i]).all(|(a, b)| a <= b)
                    && q.iter().zip(&points[i]).any(|(a, b)| a < b)
            })
        })
        .collect()
}

/// Inclusion-exclusion over every subset of a small 2-D front.
fn inclusion_exclusion(front: &[Vec<f64>], r: &[f64]) -> f64 {
    let k = front.len();
    let mut total = 0.0;
    for mask in 1u32..(1 << k) {
        let mut corner = [f64::MIN, f64::MIN];
        for (i, p) in front.iter().enumerate() {
            if mask & (1 << i) != 0 {
                corner = [corner[0].max(p[0]), corner[1].max(p[1])];
            }
        }
        let vol = (r[0] - corner[0]).max(0.0) * (r[1] - corner[1]).max(0.0);
        total += if mask.count_ones() % 2 == 1 {
            vol
        } else {
            -vol
        };
    }
    total
}

fn criterion4() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut filter_ok = 0;
    for set in 0..100 {
        let m = 2 + set % 2;
        let n = rng.gen_range(1..=500);
        let grid = set % 3 == 0;
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                (0..m)
                    .map(|_| {
                        if grid {
                            rng.gen_range(0..8) as f64
                        } else {
                            rng.gen::<f64>()
                        }
                    })
                    .collect()
            })
            .collect();
        if pareto_filter(&pts) == brute_nondominated(&pts) {
            filter_ok += 1;
        }
    }

    let hand: [(Vec<Vec<f64>>, [f64; 2], f64); 3] = [
        (vec![vec![1.0, 1.0]], [2.0, 2.0], 1.0),
        (vec![vec![0.0, 1.0], vec![1.0, 0.0]], [2.0, 2.0], 3.0),
        (
            vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![3.0, 3.0]],
            [2.0, 2.0],
            3.0,
        ),
    ];
    let mut hv_exact = hand
        .iter()
        .filter(|(f, r, want)| hypervolume(f, r).unwrap().0 == *want)
        .count();
    let mut hv_cases = hand.len();
    for _ in 0..50 {
        // dyadic coordinates keep every sum exact
        let k = rng.gen_range(1..=6);
        let f: Vec<Vec<f64>> = (0..k)
            .map(|_| {
                vec![
                    rng.gen_range(0..64) as f64 / 16.0,
                    rng.gen_range(0..64) as f64 / 16.0,
                ]
            })
            .collect();
        let r = [4.0, 4.0];
        hv_cases += 1;
        if hypervolume(&f, &r).unwrap().0 == inclusion_exclusion(&f, &r) {
            hv_exact += 1;
        }
    }

    let mut mc_ok = 0;
    let mut worst_sigma: f64 = 0.0;
    for _ in 0..20 {
        let count = rng.gen_range(1..=30);
        let raw: Vec<Vec<f64>> = (0..count)
            .map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()])
            .collect();
        let mut front: Vec<Vec<f64>> = pareto_filter(&raw)
            .into_iter()
            .map(|i| raw[i].clone())
            .collect();
        front.sort_by(|a, b| a[0].total_cmp(&b[0]));
        let r = [1.1, 1.1];
        let exact = hypervolume(&front, &r).unwrap().0;
        let mut hits = 0usize;
        for _ in 0..MC_SAMPLES {
            let (x, y) = (rng.gen_range(0.0..r[0]), rng.gen_range(0.0..r[1]));
            let k = front.partition_point(|p| p[0] <= x);
            if k > 0 && front[k - 1][1] <= y {
                hits += 1;
            }
        }
        let p = hits as f64 / MC_SAMPLES as f64;
        let area = r[0] * r[1];
        let se = area * (p * (1.0 - p) / MC_SAMPLES as f64).sqrt();
        let sigmas = (p * area - exact).abs() / se;
        worst_sigma = worst_sigma.max(sigmas);
        if sigmas <= MC_SIGMAS {
            mc_ok += 1;
        }
    }
    Verdict {
        pass: filter_ok == 100 && hv_exact == hv_cases && mc_ok == 20,
        detail: format!(
            "filter {filter_ok}/100 exact, hypervolume {hv_exact}/{hv_cases} exact, Monte Carlo {mc_ok}/20 within 3 SE (worst {worst_sigma:.2})"
        ),
    }
}

fn params(name: &str, starts: usize) -> (problems::ProblemSpec, SolverParams) {
    let spec = problems::get(name).unwrap();
    let p = SolverParams::for_problem(&spec.problem)
        .with_starts(starts)
        .with_seed(SEED);
    (spec, p)
}

fn criterion5() -> Verdict {
    let (lo, hi) = LOCAL_PLATEAU;
    let mut parts = Vec::new();
    let mut pass = true;
    for name in ["GDTEST1", "GDTEST2"] {
        let (spec, p) = params(name, ESCAPE_STARTS);
        let r = mogdm::mogdm_front(&spec.problem, &p).unwrap();
        let stuck: Vec<_> = r
            .starts
            .iter()
            .filter(|s| (lo..=hi).contains(&s.anchors[0].x[0]))
            .collect();
        let escaped = stuck
            .iter()
            .filter(|s| strictly_better(&s.anchors.last().unwrap().fx, &s.anchors[0].fx))
            .count();
        let monotone = r
            .starts
            .iter()
            .filter(|s| {
                s.anchors
                    .windows(2)
                    .all(|w| strictly_better(&w[1].fx, &w[0].fx))
            })
            .count();
        let share = if stuck.is_empty() {
            1.0
        } else {
            escaped as f64 / stuck.len() as f64
        };
        pass &= share >= ESCAPE_SHARE && monotone == r.starts.len() && !stuck.is_empty();
        parts.push(format!(
            "{name}: {escaped}/{} dominated-plateau starts escaped, {monotone}/{} trajectories decreasing",
            stuck.len(),
            r.starts.len()
        ));
    }
    Verdict {
        pass,
        detail: parts.join("; "),
    }
}

struct Pair {
    name: String,
    mogdm: RunReport,
}

fn run_pair(name: &str) -> Pair {
    let (spec, p) = params(name, FRONT_STARTS);
    let plan = build_plan(&spec.problem, &p).unwrap();
    Pair {
        name: name.to_string(),
        mogdm: run_solver(&spec.problem, &p, &plan, Solver::Mogdm).unwrap(),
    }
}

fn criterion6(names: &[&str]) -> (Verdict, Vec<Pair>) {
    let mut lines = Vec::new();
    let mut pass = true;
    let mut pairs = Vec::new();
    for name in names {
        let pair = run_pair(name);
        let r = &pair.mogdm;
        let (pf, pfg) = (r.pf.objectives(), r.pfg.objectives());
        let reference = reference_point(&[&pf, &pfg]).unwrap();
        let hv = |f: &[Vec<f64>]| hypervolume(f, &reference).unwrap().0;
        let (hv_pf, hv_pfg) = (hv(&pf), hv(&pfg));
        let factor = if MULTIMODAL_SET.contains(name) {
            MULTIMODAL_FACTOR
        } else {
            1
        };
        let ok = pfg.len() >= factor * pf.len() && hv_pfg >= hv_pf - HV_SLACK;
        pass &= ok;
        lines.push(format!(
            "{name} {}->{}{} hv {:.4e}->{:.4e}",
            pf.len(),
            pfg.len(),
            if ok { "" } else { " (!)" },
            hv_pf,
            hv_pfg
        ));
        pairs.push(pair);
    }
    (
        Verdict {
            pass,
            detail: lines.join(", "),
        },
        pairs,
    )
}

/// Distance from `f` to the ZDT1/ZDT2 front `f2 = 1 - f1^power`, by golden
/// section on the (unimodal) squared distance along `f1`.
fn distance_to_curve(f: &[f64], power: f64) -> f64 {
    let d2 = |t: f64| (t - f[0]).powi(2) + (1.0 - t.powf(power) - f[1]).powi(2);
    let samples = 20_001;
    let mut best = (f64::INFINITY, 0.0);
    for k in 0..samples {
        let t = k as f64 / (samples - 1) as f64;
        if d2(t) < best.0 {
            best = (d2(t), t);
        }
    }
    let h = 1.0 / (samples - 1) as f64;
    let (mut a, mut b) = ((best.1 - h).max(0.0), (best.1 + h).min(1.0));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let (x1, x2) = (b - g * (b - a), a + g * (b - a));
        if d2(x1) < d2(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    d2(0.5 * (a + b)).min(best.0).sqrt()
}

fn criterion7(pairs: &[Pair]) -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, power) in [("ZDT1", 0.5), ("ZDT2", 2.0)] {
        let Some(pair) = pairs.iter().find(|p| p.name == name) else {
            pass = false;
            parts.push(format!("{name} missing"));
            continue;
        };
        let mut d: Vec<f64> = pair
            .mogdm
            .pfg
            .objectives()
            .iter()
            .map(|f| distance_to_curve(f, power))
            .collect();
        d.sort_by(f64::total_cmp);
        let median = d[d.len() / 2];
        let within = d.iter().filter(|&&x| x < ZDT_MEDIAN).count();
        pass &= median < ZDT_MEDIAN;
        parts.push(format!(
            "{name} median {median:.2e}, {within}/{} points within 1e-2, max {:.2e}",
            d.len(),
            d[d.len() - 1]
        ));
    }
    Verdict {
        pass,
        detail: parts.join("; "),
    }
}

fn criterion8() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("exp.toml");
    std::fs::write(
        &config,
        "problems = [\"SCH\", \"CVX5\", \"GDTEST1\", \"GDTEST2\", \"DTLZ2n2\", \"MOP2\", \"DTLZ1n2\"]\nstarts = 40\nseed = 11\nemit_json = false\nemit_plotdata = false\n",
    )
    .unwrap();
    let run = |out: &Path| {
        main_with_args([
            "mogdm",
            "run",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--jobs",
            "2",
        ])
    };
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let codes = (run(&a), run(&b));
    let bytes = |p: &Path| std::fs::read(p.join("summary.csv")).unwrap_or_default();
    let identical = codes == (0, 0) && !bytes(&a).is_empty() && bytes(&a) == bytes(&b);

    let mut profiles_ok = true;
    let mut parts = Vec::new();
    for metric in [Metric::Hv, Metric::Fevals] {
        let curves = profile::profile_files(&[a.join("summary.csv")], metric).unwrap();
        let monotone = curves.iter().all(|c| {
            c.taus.windows(2).all(|w| w[0] < w[1])
                && c.values.windows(2).all(|w| w[0] <= w[1])
                && c.values.iter().all(|v| (0.0..=1.0).contains(v))
                && c.taus.iter().zip(&c.values).all(|(t, v)| c.at(*t) == *v)
        });
        let best = curves
            .iter()
            .max_by(|x, y| x.at(1.0).total_cmp(&y.at(1.0)))
            .unwrap();
        let top = *best.values.last().unwrap_or(&0.0);
        profiles_ok &= monotone && top == 1.0 && curves.iter().all(|c| c.ratios.len() >= 6);
        parts.push(format!(
            "{} profile: best {} reaches {top} at tau_max, monotone {monotone}",
            metric.label(),
            best.solver
        ));
    }
    // the library profile on a hand table, as a cross-check of the writer path
    let hand = performance_profile(
        &["a".into(), "b".into()],
        &[vec![Some(1.0), Some(2.0)], vec![Some(2.0), Some(2.0)]],
    )
    .unwrap();
    profiles_ok &= hand[0].values == vec![1.0, 1.0] && hand[1].values == vec![0.5, 1.0];
    Verdict {
        pass: identical && profiles_ok,
        detail: format!(
            "summary byte-identical {identical} (exit codes {codes:?}), {}",
            parts.join(", ")
        ),
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let out = f();
    (out, t.elapsed())
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let filters: Vec<&String> = args.iter().filter(|a| !a.starts_with('-')).collect();
    if !filters.is_empty() && !filters.iter().any(|f| "acceptance".contains(f.as_str())) {
        return;
    }
    let long = args
        .iter()
        .any(|a| a == "--ignored" || a == "--include-ignored");

    let mut all = true;
    let (v, t) = timed(criterion1);
    all &= report("1", "V/A identities", t, Some(C1_BUDGET), v);
    let (v, t) = timed(criterion2);
    all &= report("2", "gradient correctness", t, Some(C2_BUDGET), v);
    let (v, t) = timed(criterion3);
    all &= report("3", "descent invariants", t, Some(C3_BUDGET), v);
    let (v, t) = timed(criterion4);
    all &= report("4", "oracle equivalence", t, Some(C4_BUDGET), v);
    let (v, t) = timed(criterion5);
    all &= report("5", "escape behaviour", t, Some(C5_BUDGET), v);

    let small: Vec<String> = problems::registry()
        .iter()
        .map(|s| s.name().to_string())
        .filter(|n| !LONG_SET.contains(&n.as_str()))
        .collect();
    let small: Vec<&str> = small.iter().map(String::as_str).collect();
    let ((v, pairs), t6) = timed(|| criterion6(&small));
    all &= report(
        "6",
        "PFG versus PF, small-n problems",
        t6,
        Some(C6_BUDGET),
        v,
    );
    // criterion 7 reuses the criterion 6 runs and shares its budget
    let (v, t7) = timed(|| criterion7(&pairs));
    all &= report("7", "ZDT front quality", t6 + t7, Some(C6_BUDGET), v);
    let (v, t) = timed(criterion8);
    all &= report("8", "determinism and profiles", t, None, v);

    if long {
        let ((v, _), t) = timed(|| criterion6(&LONG_SET));
        all &= report(
            "6 (long)",
            "PFG versus PF, n = 50 problems",
            t,
            Some(C6_LONG_BUDGET),
            v,
        );
    } else {
        println!("SKIP criterion 6 (long): n = 50 problems run with -- --ignored");
    }
    if !all {
        std::process::exit(1);
    }
}
