//! End-to-end runs of the `uamsim` binary.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn uamsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uamsim"))
        .args(args)
        .env_remove("UAMSIM_OUT")
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = uamsim(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn full_run(dir: &Path, flights: &str, jobs: &str) {
    let d = dir.to_str().unwrap();
    ok(&["simulate", "--out", d, "--flights", flights]);
    ok(&["dilate", "--out", d]);
    ok(&["evaluate", "--out", d, "--jobs", jobs]);
}

/// Every stage artifact, keyed by path relative to the run dir. The run
/// manifest carries wall-clock timing and is left out.
fn artifacts(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<PathBuf, Vec<u8>>) {
        for e in std::fs::read_dir(dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                walk(root, &p, out);
            } else if p.file_name().unwrap() != "run_manifest.json" {
                out.insert(p.strip_prefix(root).unwrap().to_path_buf(), std::fs::read(&p).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(dir, dir, &mut out);
    out
}

#[test]
fn zero_flights_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = uamsim(&["simulate", "--out", dir.path().to_str().unwrap(), "--flights", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("flight"), "{}", stderr(&out));
}

#[test]
fn bad_arguments_exit_one() {
    assert_eq!(uamsim(&["simulate", "--flights", "many"]).status.code(), Some(1));
    assert_eq!(uamsim(&["dilate", "--delta-h", "15 parsecs"]).status.code(), Some(1));
    assert_eq!(uamsim(&["--help"]).status.code(), Some(0));
}

#[test]
fn stages_out_of_order_point_at_the_missing_stage() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("run");
    let out = uamsim(&["dilate", "--out", d.to_str().unwrap()]);
    assert_ne!(out.status.code(), Some(0));
    let empty = dir.path().to_str().unwrap();
    let out = uamsim(&["evaluate", "--out", empty]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("run simulate first"), "{}", stderr(&out));

    ok(&["simulate", "--out", empty, "--flights", "3"]);
    let out = uamsim(&["evaluate", "--out", empty]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("dilate"), "{}", stderr(&out));
}

#[test]
fn corrupted_trajectory_names_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    ok(&["simulate", "--out", d, "--flights", "4"]);
    let f = dir.path().join("trajectories/flight_0002.csv");
    let text = std::fs::read_to_string(&f).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    lines[4] = "1.0,2.0,oops,4.0,5.0".into();
    std::fs::write(&f, lines.join("\n") + "\n").unwrap();
    let out = uamsim(&["dilate", "--out", d]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("flight_0002.csv") && err.contains("line 5"), "{err}");
}

#[test]
fn tampered_config_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    ok(&["simulate", "--out", d, "--flights", "3"]);
    let cfg = dir.path().join("config.toml");
    let text = std::fs::read_to_string(&cfg).unwrap();
    std::fs::write(&cfg, text + "\n# edited\n").unwrap();
    // Comments do not change the canonical hash.
    ok(&["dilate", "--out", d]);
    let text = std::fs::read_to_string(&cfg).unwrap().replace("rng_seed = 42", "rng_seed = 43");
    std::fs::write(&cfg, text).unwrap();
    let out = uamsim(&["dilate", "--out", d]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn reruns_are_byte_identical_across_job_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    full_run(a.path(), "40", "1");
    full_run(b.path(), "40", "8");
    let (x, y) = (artifacts(a.path()), artifacts(b.path()));
    assert_eq!(x.keys().collect::<Vec<_>>(), y.keys().collect::<Vec<_>>());
    for (k, v) in &x {
        assert!(v == &y[k], "{} differs", k.display());
    }
}

#[test]
fn evaluation_stage_reruns_in_isolation() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    full_run(dir.path(), "20", "2");
    let before = artifacts(dir.path());
    std::fs::remove_dir_all(dir.path().join("evaluation")).unwrap();
    ok(&["evaluate", "--out", d, "--jobs", "3"]);
    assert_eq!(before, artifacts(dir.path()));
}

#[test]
fn report_for_an_all_feasible_run() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    ok(&["simulate", "--out", d, "--flights", "5", "--delta-v", "0", "--delta-h", "0"]);
    ok(&["dilate", "--out", d]);
    let table = ok(&["evaluate", "--out", d]);
    assert!(table.contains("| uamsim | 5 | 0 |"), "{table}");
    let report = ok(&["report", "--out", d]);
    assert!(report.contains("infeasible: 0"), "{report}");
    assert!(!report.contains("failed in"), "{report}");
}

#[test]
fn report_counts_failures_by_segment() {
    let dir = tempfile::tempdir().unwrap();
    full_run(dir.path(), "60", "0");
    let report = ok(&["report", "--out", dir.path().to_str().unwrap()]);
    let results: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("evaluation/report.json")).unwrap()).unwrap();
    let infeasible = results["n_infeasible"].as_u64().unwrap();
    assert!(report.contains(&format!("infeasible: {infeasible}")), "{report}");
    assert!(infeasible > 0);
    assert!(report.contains("failed in"), "{report}");
}
