use std::fs;
use std::path::Path;
use std::process::Command;

use mogdm::dominates;
use mogdm::metrics::ProfileCurve;
use mogdm_cli::app::main_with_args;
use mogdm_cli::output::{read_summary, write_summary, SummaryRow};
use mogdm_cli::profile::{self, Metric};

fn run(args: &[&str]) -> i32 {
    let mut all = vec!["mogdm"];
    all.extend_from_slice(args);
    main_with_args(all)
}

fn read_dat(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| l.split_whitespace().map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn run_writes_one_row_per_solver() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    assert_eq!(
        run(&[
            "run",
            "--problem",
            "GDTEST1",
            "--starts",
            "50",
            "--out",
            out.to_str().unwrap()
        ]),
        0
    );
    let rows = read_summary(&out.join("summary.csv")).unwrap();
    assert_eq!(rows.len(), 2);
    let count = |s: &str| {
        rows.iter()
            .find(|r| r.solver == s)
            .unwrap()
            .n_nondominated
            .unwrap()
    };
    assert!(count("mogdm") >= count("local-only"));
    assert!(rows.iter().all(|r| r.wall_time.is_none()));
    assert!(out.join("fronts_GDTEST1.csv").exists());
    assert!(out.join("reports/GDTEST1_mogdm.json").exists());
    assert!(out.join("plot/GDTEST1_local-only.dat").exists());
}

#[test]
fn nothing_is_written_when_every_output_is_off() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.toml");
    let out = dir.path().join("out");
    fs::write(&config, "problems = [\"SCH\"]\nstarts = 10\nemit_csv = false\nemit_json = false\nemit_plotdata = false\n").unwrap();
    assert_eq!(
        run(&[
            "run",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out.to_str().unwrap()
        ]),
        0
    );
    assert!(!out.exists());
}

#[test]
fn equal_runs_give_identical_summaries() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.toml");
    fs::write(
        &config,
        "problems = [\"SCH\", \"GDTEST2\"]\nstarts = 30\nseed = 7\ntiming = false\n",
    )
    .unwrap();
    let mut bytes = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        assert_eq!(
            run(&[
                "run",
                "--config",
                config.to_str().unwrap(),
                "--out",
                out.to_str().unwrap()
            ]),
            0
        );
        bytes.push(fs::read(out.join("summary.csv")).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
    let reports: Vec<_> = ["a", "b"]
        .iter()
        .map(|d| fs::read(dir.path().join(d).join("reports/GDTEST2_mogdm.json")).unwrap())
        .collect();
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn bad_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.toml");
    fs::write(&config, "problems = [\"SCH\"]\nstarts = 10\nmystery = 3\n").unwrap();
    assert_eq!(run(&["run", "--config", config.to_str().unwrap()]), 1);
    assert_eq!(run(&["run", "--problem", "NOPE"]), 1);
    assert_eq!(
        run(&["profile", "--metric", "time", config.to_str().unwrap()]),
        1
    );
}

fn row(problem: &str, solver: &str, hv: f64, fevals: u64) -> SummaryRow {
    SummaryRow {
        problem: problem.into(),
        m: 2,
        n: 1,
        solver: solver.into(),
        n_nondominated: Some(5),
        hypervolume: Some(hv),
        delta: Some(0.5),
        f_evals: Some(fevals),
        wall_time: None,
    }
}

#[test]
fn identical_summaries_profile_to_one_at_tau_one() {
    let dir = tempfile::tempdir().unwrap();
    let rows = vec![row("A", "mogdm", 2.0, 100), row("B", "mogdm", 3.0, 50)];
    let (a, b) = (dir.path().join("first.csv"), dir.path().join("second.csv"));
    write_summary(&a, &rows).unwrap();
    write_summary(&b, &rows).unwrap();
    let curves = profile::profile_files(&[a, b], Metric::Hv).unwrap();
    assert_eq!(curves.len(), 2);
    assert!(curves.iter().all(|c| c.at(1.0) == 1.0));
    assert_eq!(curves[0].solver, "first:mogdm");
}

#[test]
fn hand_built_fevals_profile() {
    // ratios: x = [1, 1, 2], y = [2, 1.5, 1]
    let dir = tempfile::tempdir().unwrap();
    let rows = vec![
        row("A", "x", 1.0, 10),
        row("A", "y", 1.0, 20),
        row("B", "x", 1.0, 20),
        row("B", "y", 1.0, 30),
        row("C", "x", 1.0, 40),
        row("C", "y", 1.0, 20),
    ];
    let path = dir.path().join("s.csv");
    write_summary(&path, &rows).unwrap();
    let out = dir.path().join("prof");
    assert_eq!(
        run(&[
            "profile",
            path.to_str().unwrap(),
            "--metric",
            "fevals",
            "--out",
            out.to_str().unwrap()
        ]),
        0
    );
    let curves: Vec<ProfileCurve> = profile::profile_files(&[path], Metric::Fevals).unwrap();
    assert_eq!(curves[0].taus, vec![1.0, 1.5, 2.0]);
    assert_eq!(curves[0].values, vec![2.0 / 3.0, 2.0 / 3.0, 1.0]);
    assert_eq!(curves[1].values, vec![1.0 / 3.0, 2.0 / 3.0, 1.0]);

    let mut reader = csv::Reader::from_path(out.join("profile_fevals.csv")).unwrap();
    assert_eq!(
        reader.headers().unwrap().iter().collect::<Vec<_>>(),
        ["solver", "tau", "rho"]
    );
    assert_eq!(reader.records().count(), 6);

    let text = fs::read_to_string(out.join("profile_fevals.dat")).unwrap();
    let blocks: Vec<&str> = text.split("\n\n\n").collect();
    assert_eq!(blocks.len(), 2);
    for block in blocks {
        let pts: Vec<Vec<f64>> = block
            .lines()
            .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
            .map(|l| l.split_whitespace().map(|x| x.parse().unwrap()).collect())
            .collect();
        assert_eq!(pts.len(), 3);
        assert!(pts
            .windows(2)
            .all(|w| w[0][0] < w[1][0] && w[0][1] <= w[1][1]));
    }
}

#[test]
fn front_on_the_bimodal_problem_improves_on_the_local_front() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    assert_eq!(
        run(&[
            "front",
            "GDTEST1",
            "--starts",
            "60",
            "--out",
            out.to_str().unwrap()
        ]),
        0
    );
    let pf = read_dat(&out.join("plot/GDTEST1_mogdm_pf.dat"));
    let pfg = read_dat(&out.join("plot/GDTEST1_mogdm_pfg.dat"));
    assert!(!pfg.is_empty());
    for g in &pfg {
        assert!(
            !pf.iter().any(|p| dominates(p, g).unwrap()),
            "{g:?} is dominated by the local front"
        );
    }
    let rows = read_summary(&out.join("summary.csv")).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].solver, "mogdm");
}

#[test]
fn front_on_a_convex_pair_needs_no_escape() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    assert_eq!(
        run(&[
            "front",
            "CVX5",
            "--starts",
            "30",
            "--out",
            out.to_str().unwrap()
        ]),
        0
    );
    let mut pf = read_dat(&out.join("plot/CVX5_mogdm_pf.dat"));
    let mut pfg = read_dat(&out.join("plot/CVX5_mogdm_pfg.dat"));
    pf.sort_by(|a, b| a[0].total_cmp(&b[0]));
    pfg.sort_by(|a, b| a[0].total_cmp(&b[0]));
    assert_eq!(pf.len(), pfg.len());
    for (a, b) in pf.iter().zip(&pfg) {
        assert!(
            a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-6),
            "{a:?} vs {b:?}"
        );
    }
}

#[test]
fn front_on_zdt1_lies_near_the_analytic_curve() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    assert_eq!(
        run(&[
            "front",
            "ZDT1",
            "--starts",
            "100",
            "--out",
            out.to_str().unwrap()
        ]),
        0
    );
    let pfg = read_dat(&out.join("plot/ZDT1_mogdm_pfg.dat"));
    // vertical gap to f2 = 1 - sqrt(f1) bounds the distance to the curve
    let mut gaps: Vec<f64> = pfg
        .iter()
        .map(|f| (f[1] - (1.0 - f[0].max(0.0).sqrt())).abs())
        .collect();
    gaps.sort_by(f64::total_cmp);
    let within = gaps.iter().filter(|&&g| g < 1e-2).count();
    assert!(
        gaps[gaps.len() / 2] < 1e-2,
        "median gap {}",
        gaps[gaps.len() / 2]
    );
    assert!(
        within * 10 >= gaps.len() * 8,
        "{within} of {} within 1e-2",
        gaps.len()
    );
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_mogdm");
    let code = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(code(&["--help"]), Some(0));
    assert_eq!(code(&["frobnicate"]), Some(1));
    assert_eq!(code(&["run", "--starts", "many"]), Some(1));
    let listing = Command::new(bin).arg("list-problems").output().unwrap();
    assert!(listing.status.success());
    let text = String::from_utf8(listing.stdout).unwrap();
    assert!(text.contains("GDTEST1") && text.contains("DTLZ3n2"));
}

#[test]
fn check_command_passes() {
    let out = Command::new(env!("CARGO_BIN_EXE_mogdm"))
        .args(["check", "--seed", "3"])
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.lines().all(|l| l.starts_with("PASS")));
}
