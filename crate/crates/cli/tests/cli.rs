use std::path::Path;
use std::process::{Command, Output};

use prodherz::verify::{InequalityReport, Status};
use tempfile::TempDir;

const HEADER: &str = "[grid]\nl_max = 2\ns = 2\n\n[[params]]\nalpha = 0.25\np = 2\nq = 2\nlambda = 0.5\n\n";

fn prodherz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prodherz")).args(args).output().unwrap()
}

/// Writes `config.toml` into a fresh directory and runs `prodherz run` on it.
fn run(config: &str, extra: &[&str]) -> (TempDir, Output) {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("config.toml");
    std::fs::write(&path, config).unwrap();
    let out = dir.path().join("out");
    let mut args = vec!["run", path.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = prodherz(&args);
    (dir, o)
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn index(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("out/index.json")).unwrap()).unwrap()
}

#[test]
fn minimal_config_writes_one_report() {
    let (dir, o) = run(&format!("{HEADER}[[suites]]\nsuite = \"char_norms\"\n"), &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("out/00-char_norms-00.json")).unwrap();
    let report = InequalityReport::from_json(&text).unwrap();
    assert_eq!(report.status, Status::Pass);
    assert_eq!(format!("{}\n", report.to_json()), text);
    let idx = index(dir.path());
    assert_eq!(idx["all_ok"], true);
    assert_eq!(idx["entries"].as_array().unwrap().len(), 1);
    assert_eq!(idx["entries"][0]["status"], "pass");
}

#[test]
fn usage_errors_exit_two() {
    let (_d, o) = run(&format!("{HEADER}[[suites]]\nsuite = \"no_such_suite\"\n"), &[]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("suites[0]"), "{}", stderr(&o));

    let (d, o) = run(&format!("{HEADER}[[suites]]\nsuite = \"maximal_bounds\"\ncap = \"big\"\n"), &[]);
    assert_eq!(code(&o), 2);
    assert!(!d.path().join("out").exists(), "nothing runs before validation");

    let o = prodherz(&["run", "/nonexistent/config.toml"]);
    assert_eq!(code(&o), 2);
    assert_eq!(code(&prodherz(&["frobnicate"])), 2);
}

#[test]
fn predicate_violations_exit_three() {
    let cfg = "[grid]\nl_max = 2\ns = 2\n[[params]]\nalpha = -0.6\np = 2\nq = 2\nlambda = 0.5\n[[suites]]\nsuite = \"char_norms\"\n";
    let (_d, o) = run(cfg, &[]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("pred_char"), "{}", stderr(&o));
}

#[test]
fn failing_caps_and_strictness() {
    let failing = format!("{HEADER}[[suites]]\nsuite = \"maximal_bounds\"\ntrials = 2\ncap = 0.5\n");
    let (dir, o) = run(&failing, &[]);
    assert_eq!(code(&o), 1);
    let idx = index(dir.path());
    assert_eq!(idx["entries"][0]["status"], "fail");
    assert!(idx["entries"][0]["failed_checks"].as_array().unwrap().iter().any(|c| c == "sup_ratio"));

    let outside = "[grid]\nl_max = 2\ns = 2\n[[params]]\nalpha = 0.75\np = 2\nq = 2\nlambda = 0.5\n\
                   [[suites]]\nsuite = \"maximal_bounds\"\ntrials = 2\n";
    let (dir, o) = run(outside, &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(index(dir.path())["entries"][0]["status"], "out-of-hypothesis");
    let (_d, o) = run(outside, &["--strict"]);
    assert_eq!(code(&o), 1);
    let (_d, o) = run(&outside.replace("trials = 2", "trials = 2\nstrict = true"), &[]);
    assert_eq!(code(&o), 1);
}

#[test]
fn csv_output_is_deterministic() {
    let cfg = format!(
        "{HEADER}[[suites]]\nsuite = \"john_nirenberg_bmo\"\n\n[[suites]]\nsuite = \"maximal_bounds\"\ntrials = 3\n\
         params = [{{ alpha = 0.25, p = 2, q = 2, lambda = 0.5 }}, {{ alpha = 0.1, p = 3, q = 3, lambda = 0.25 }}]\n"
    );
    let (a, o) = run(&cfg, &["--format", "csv"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (b, o) = run(&cfg, &["--format", "csv", "--parallel"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let names = ["00-john_nirenberg_bmo-00.csv", "01-maximal_bounds-00.csv", "01-maximal_bounds-01.csv", "index.json"];
    for name in names {
        let x = std::fs::read(a.path().join("out").join(name)).unwrap();
        let y = std::fs::read(b.path().join("out").join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
    let jn = std::fs::read_to_string(a.path().join("out").join(names[0])).unwrap();
    let mut rows = csv::Reader::from_reader(jn.as_bytes());
    assert_eq!(
        rows.headers().unwrap().iter().collect::<Vec<_>>(),
        ["claim", "trial", "lhs", "rhs", "ratio", "x", "y", "label", "params", "tool_version"]
    );
    let decay: Vec<(f64, f64)> = rows
        .records()
        .map(|r| r.unwrap())
        .filter(|r| r[7].starts_with("level_set/box/"))
        .map(|r| (r[5].parse().unwrap(), r[6].parse().unwrap()))
        .collect();
    assert_eq!(decay.len(), 8);
    assert!(decay.windows(2).all(|w| w[0].0 < w[1].0));
}

#[test]
fn list_suites() {
    let o = prodherz(&["list-suites"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 7);
    assert!(text.lines().any(|l| l.starts_with("fefferman_stein")));
    let o = prodherz(&["list-suites", "--defaults"]);
    let lines: Vec<serde_json::Value> =
        String::from_utf8(o.stdout).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 7);
    assert_eq!(lines[4]["suite"], "extrapolation");
}

#[test]
fn estimate_c() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("c.toml");
    std::fs::write(&path, format!("{HEADER}[[suites]]\nsuite = \"extrapolation\"\ntrials = 2\n")).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_prodherz"))
        .args(["estimate-c", path.to_str().unwrap()])
        .env("PRODHERZ_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v[0]["c"].as_f64().unwrap() >= 1.0);
    assert_eq!(v[0]["p0"], 1.25);

    std::fs::write(&path, format!("{HEADER}[[suites]]\nsuite = \"char_norms\"\n")).unwrap();
    assert_eq!(code(&prodherz(&["estimate-c", path.to_str().unwrap()])), 2);
}
