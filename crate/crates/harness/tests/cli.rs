use std::path::{Path, PathBuf};
use std::process::Command;

use netzero_core::env::{Plan, Tech};
use netzero_harness::cli::run;
use netzero_harness::manifest::RunManifest;
use netzero_harness::sha256_hex;

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

/// Runs the CLI in-process and returns (exit code, stdout, stderr).
fn netzero(out: &Path, args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["netzero", "--out", out.to_str().unwrap()];
    argv.extend_from_slice(args);
    let (mut so, mut se) = (Vec::new(), Vec::new());
    let code = run(argv, &mut so, &mut se);
    (code, String::from_utf8(so).unwrap(), String::from_utf8(se).unwrap())
}

fn ok(out: &Path, args: &[&str]) -> String {
    let (code, so, se) = netzero(out, args);
    assert_eq!(code, 0, "{args:?}: {se}");
    so
}

fn read(dir: &Path, rel: &str) -> String {
    std::fs::read_to_string(dir.join(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

fn number_after(text: &str, key: &str) -> f64 {
    let mut words = text.split_whitespace();
    words.find(|w| *w == key).unwrap_or_else(|| panic!("no `{key}` in {text}"));
    words.next().unwrap().parse().unwrap()
}

fn fast() -> String {
    config("fast.toml").display().to_string()
}

#[test]
fn zero_plan_episode_scores_zero_and_is_reproducible() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let so = ok(a.path(), &["episode", "--plan", "zero", "--seed", "4"]);
    assert_eq!(number_after(&so, "score"), 0.0);
    ok(b.path(), &["episode", "--plan", "zero", "--seed", "4"]);
    assert_eq!(read(a.path(), "trace.csv"), read(b.path(), "trace.csv"));
    assert_eq!(read(a.path(), "trace.csv").lines().count(), 21);
}

#[test]
fn random_plan_episode_is_reproducible() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let s1 = ok(a.path(), &["episode", "--plan", "random:3", "--seed", "9"]);
    let s2 = ok(b.path(), &["episode", "--plan", "random:3", "--seed", "9"]);
    assert_eq!(s1, s2);
    assert_eq!(read(a.path(), "trace.json"), read(b.path(), "trace.json"));
}

#[test]
fn optimize_eg_writes_a_feasible_plan_with_monotone_incumbents() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fast();
    ok(dir.path(), &["--config", &cfg, "--seed-set", "range:0:5", "optimize", "--solver", "eg"]);
    let plan = Plan::from_json_str(&read(dir.path(), "plan.json")).unwrap();
    assert_eq!(plan.horizon(), 20);
    for a in plan.actions() {
        for t in Tech::ALL {
            assert!((0.0..=t.upper_bound()).contains(&a.get(t)));
        }
    }
    assert_eq!(read(dir.path(), "plan.csv").lines().count(), 21);
    let values: Vec<f64> = read(dir.path(), "incumbents.csv")
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(!values.is_empty());
    assert!(values.windows(2).all(|w| w[1] >= w[0]), "{values:?}");
}

#[test]
fn optimize_local_prints_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fast();
    let so = ok(dir.path(), &["--config", &cfg, "--deterministic", "optimize", "--solver", "local"]);
    assert!(so.contains("local optimum certified"), "{so}");
}

#[test]
fn evaluate_zero_plan_and_singleton_matches_episode() {
    let dir = tempfile::tempdir().unwrap();
    let so = ok(dir.path(), &["--seed-set", "range:0:10", "evaluate", "--plan", "zero"]);
    assert_eq!(number_after(&so, "mean"), 0.0);
    assert_eq!(number_after(&so, "std_error"), 0.0);

    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let s1 = ok(a.path(), &["--seed-set", "range:0:10", "evaluate", "--plan", "random:5"]);
    let s2 = ok(b.path(), &["--seed-set", "range:0:10", "evaluate", "--plan", "random:5"]);
    assert_eq!(s1, s2);
    assert_eq!(read(a.path(), "scores.csv"), read(b.path(), "scores.csv"));

    let single = ok(a.path(), &["--seed-set", "17", "evaluate", "--plan", "random:5"]);
    let episode = ok(b.path(), &["episode", "--plan", "random:5", "--seed", "17"]);
    assert_eq!(number_after(&single, "mean"), number_after(&episode, "score"));
}

#[test]
fn evaluate_reads_plan_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    let mut plan = Plan::zeros(20);
    plan.set(3, Tech::Green, 5.0);
    std::fs::write(&path, plan.to_json()).unwrap();
    let from_file = ok(dir.path(), &["--seed-set", "1,2", "evaluate", "--plan", path.to_str().unwrap()]);
    assert!(number_after(&from_file, "mean").is_finite());
}

fn leaderboard_rows(dir: &Path) -> Vec<Vec<String>> {
    read(dir, "leaderboard.csv")
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn leaderboard_single_solver_has_one_row() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["--seed-set", "range:0:3", "leaderboard", "--solvers", "random"]);
    let rows = leaderboard_rows(dir.path());
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][1], "random");
    assert_eq!(read(dir.path(), "timings.csv").lines().count(), 2);
}

#[test]
fn leaderboard_ranks_and_reports_dnf() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("broken.json");
    std::fs::write(&cfg, r#"{ "solvers": { "ddpg": { "actor_lr": 0.0 } } }"#).unwrap();
    let out = dir.path().join("out");
    let so = ok(&out, &["--config", cfg.to_str().unwrap(), "--seed-set", "range:0:5", "leaderboard", "--solvers", "random,ddpg,eg"]);
    assert!(so.contains("DNF"), "{so}");
    let rows = leaderboard_rows(&out);
    let solvers: Vec<&str> = rows.iter().map(|r| r[1].as_str()).collect();
    assert_eq!(solvers, ["eg", "random", "ddpg"]);
    assert_eq!(rows[2][2], "DNF");
    let means: Vec<f64> = rows[..2].iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(means[0] >= means[1]);
    assert!(!out.join("plans/ddpg.json").exists());
}

#[test]
fn oracle_is_reproducible_and_bounds_eg() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let cfg = config("tiny_green.json").display().to_string();
    let s1 = ok(a.path(), &["--config", &cfg, "--deterministic", "oracle"]);
    ok(b.path(), &["--config", &cfg, "--deterministic", "oracle"]);
    assert_eq!(read(a.path(), "oracle.json"), read(b.path(), "oracle.json"));
    assert_eq!(read(a.path(), "plan.json"), read(b.path(), "plan.json"));

    let eg = ok(b.path(), &["--config", &cfg, "--deterministic", "optimize", "--solver", "eg"]);
    let oracle = number_after(&s1, "score");
    let eg = number_after(&eg, "objective");
    assert!(oracle >= eg - 1e-9 * oracle.abs(), "{oracle} < {eg}");

    let (code, _, err) = netzero(a.path(), &["--config", &cfg, "oracle", "--levels", ""]);
    assert_eq!(code, 1, "{err}");
}

#[test]
fn oracle_without_tiny_section_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = netzero(dir.path(), &["oracle"]);
    assert_eq!(code, 1);
}

#[test]
fn manifest_records_config_hash() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("tiny_wind_blue.json");
    ok(dir.path(), &["--config", cfg.to_str().unwrap(), "--seed-set", "2,3", "episode"]);
    let m: RunManifest = serde_json::from_str(&read(dir.path(), "manifest.json")).unwrap();
    assert_eq!(m.config_sha256, sha256_hex(&std::fs::read(&cfg).unwrap()));
    assert_eq!(m.command, "episode");
    assert_eq!(m.seed_set.seeds, [2, 3]);
    assert!(m.finished_at_unix_ms.is_some());
    let paths: Vec<&str> = m.artifacts.iter().map(|a| a.path.as_str()).collect();
    assert_eq!(paths, ["trace.csv", "trace.json"]);
    assert_eq!(m.artifacts[0].sha256, sha256_hex(read(dir.path(), "trace.csv").as_bytes()));
}

#[test]
fn bad_arguments_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["optimize", "--solver", "annealing"][..],
        &["--seed-set", "range:1", "episode"],
        &["episode", "--plan", "random:x"],
        &["leaderboard", "--solvers", ""],
    ] {
        let (code, _, _) = netzero(dir.path(), args);
        assert_eq!(code, 1, "{args:?}");
    }
    let (code, _, _) = netzero(dir.path(), &["evaluate", "--plan", "/nonexistent/plan.json"]);
    assert_eq!(code, 2);
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_netzero");
    let status = |args: &[&str]| Command::new(bin).args(args).current_dir(dir.path()).output().unwrap();
    assert_eq!(status(&["--help"]).status.code(), Some(0));
    assert_eq!(status(&["--version"]).status.code(), Some(0));
    assert_eq!(status(&["bogus"]).status.code(), Some(1));
    let out = status(&["episode", "--plan", "random:1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("score "));
    assert!(dir.path().join("out/trace.csv").exists());
}

#[test]
fn toml_config_loads() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fast();
    let so = ok(dir.path(), &["--config", &cfg, "--seed-set", "1", "optimize", "--solver", "random"]);
    assert!(so.starts_with("random objective"), "{so}");
    let m: RunManifest = serde_json::from_str(&read(dir.path(), "manifest.json")).unwrap();
    assert_eq!(m.solver_config.unwrap()["seed"], 3);
}
