mod common;

use std::path::Path;
use std::process::{Command, Output};

use ocf::data::{load_dataset, DatasetManifest};
use ocf::lp::write_lp;
use ocf_core::baselines::n_min_for;
use ocf_core::formulation::{build_ocf_model, OcfConfig};

use common::{data_dir, scratch};

fn ocf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ocf")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn ingest_reports_shape_and_seed() {
    let m = data_dir().join("heart_statlog.manifest");
    let dir = scratch();
    let plan = dir.path().join("folds.txt");
    let o = ocf(&["--seed", "7", "ingest", "--manifest", path(&m), "--folds-out", path(&plan)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("dataset heart_statlog (270 rows, 13 features, 120 positive)"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed: 7"));
    assert!(plan.exists());
}

#[test]
fn exit_codes() {
    assert_eq!(ocf(&["ingest", "--bogus"]).status.code(), Some(1));
    assert_eq!(ocf(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(ocf(&["--solver", "gurobi", "ingest", "--manifest", "x"]).status.code(), Some(1));
    assert_eq!(ocf(&["--help"]).status.code(), Some(0));
    assert_eq!(ocf(&["ingest", "--manifest", "/nonexistent/x.manifest"]).status.code(), Some(2));
    let m = data_dir().join("toy16.manifest");
    let dir = scratch();
    let out = dir.path().join("f.txt");
    let o = ocf(&["--solver-path", "/nonexistent/cbc", "train", "--manifest", path(&m), "--method", "ocf3", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn train_export_and_trace() {
    let m = data_dir().join("toy16.manifest");
    let dir = scratch();
    let forest = dir.path().join("rf.forest");
    let o = ocf(&["train", "--manifest", path(&m), "--method", "rf3", "--out", path(&forest)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("3-RF training accuracy"));

    let dots = dir.path().join("dot");
    let o = ocf(&["export-dot", "--forest", path(&forest), "--out", path(&dots)]);
    assert_eq!(o.status.code(), Some(0));
    let first = std::fs::read_to_string(dots.join("tree_0.dot")).unwrap();
    assert!(first.starts_with("digraph \"tree_0\""));
    assert!(dots.join("tree_2.dot").exists());
    ocf(&["export-dot", "--forest", path(&forest), "--out", path(&dots)]);
    assert_eq!(std::fs::read_to_string(dots.join("tree_0.dot")).unwrap(), first);

    let o = ocf(&["trace", "--forest", path(&forest), "--manifest", path(&m), "--row", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("tree 2:") && text.contains("majority "), "{text}");

    let o = ocf(&["trace", "--forest", path(&forest), "--observation", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
    let o = ocf(&["trace", "--forest", path(&forest), "--observation", "0.5,0.5"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn emit_lp_matches_the_library_writer() {
    let m = data_dir().join("toy16.manifest");
    let dir = scratch();
    let lp = dir.path().join("model.lp");
    let o = ocf(&["emit-lp", "--manifest", path(&m), "--trees", "3", "--depth", "2", "--budget", "4", "--out", path(&lp)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let d = load_dataset(&DatasetManifest::from_file(&m).unwrap()).unwrap();
    let fm = build_ocf_model(&d, &OcfConfig::new(3, 2, 4, n_min_for(16))).unwrap();
    assert_eq!(std::fs::read_to_string(&lp).unwrap(), write_lp(&fm.model).unwrap());
}

#[test]
fn toy_benchmark_writes_reports() {
    let spec = data_dir().join("toy16.spec");
    let dir = scratch();
    let out = dir.path().join("bench");
    let o = ocf(&["benchmark", "--spec", path(&spec), "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let results = std::fs::read_to_string(out.join("results.csv")).unwrap();
    assert_eq!(results.lines().count(), 1 + 2);
    assert!(std::fs::read_to_string(out.join("summary.txt")).unwrap().contains("CART"));
    assert!(out.join("summary.csv").exists() && out.join("timings.csv").exists());

    let again = dir.path().join("again");
    ocf(&["benchmark", "--spec", path(&spec), "--out", path(&again)]);
    assert_eq!(std::fs::read_to_string(again.join("results.csv")).unwrap(), results);
}

#[test]
fn cart_benchmark_needs_no_solver() {
    let spec = data_dir().join("heart_statlog.spec");
    let dir = scratch();
    let o = ocf(&[
        "--solver-path",
        "/nonexistent/cbc",
        "benchmark",
        "--spec",
        path(&spec),
        "--methods",
        "cart",
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert!(summary.contains("heart_statlog,cart,"));
}

#[test]
fn failed_solver_column_sets_the_exit_code() {
    let spec = data_dir().join("toy16.spec");
    let dir = scratch();
    let o = ocf(&[
        "--solver-path",
        "/nonexistent/cbc",
        "benchmark",
        "--spec",
        path(&spec),
        "--methods",
        "cart,ocf3",
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("no usable model for: 3-OCF"));
}
